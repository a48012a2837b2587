//! Oracles shared by the integration tests. Each one recomputes a quantity
//! from first principles instead of calling the optimized library path.
#![allow(dead_code)]

use num_traits::Zero;
use pfg_core::partitions::{enumerate_partitions, reduces_to_by_deletion};
use pfg_core::rational::{int, pow};
use pfg_core::{Coalition, EmbeddedCoalition, Fragment, Rational};

pub const THREE_AGENTS: &str = include_str!("../../fixtures/three_agents.game");

/// Bell numbers `B(0..=max)` from the Bell triangle.
pub fn bell_triangle(max: usize) -> Vec<u64> {
    let mut bell = vec![1u64];
    let mut row = vec![1u64];
    for _ in 1..=max {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        bell.push(next[0]);
        row = next;
    }
    bell
}

/// Every fragment whose agents lie in `0..n`, plus `{∅}`.
pub fn all_fragments(n: usize) -> Vec<Fragment> {
    let mut out = vec![Fragment::EmptyCoalition];
    for bits in 1..1u32 << n {
        let universe: Vec<usize> = Coalition::from_bits(bits).agents().collect();
        for p in enumerate_partitions(universe.len()).unwrap() {
            let blocks = p
                .blocks()
                .iter()
                .map(|b| Coalition::from_agents(b.agents().map(|a| universe[a])))
                .collect();
            out.push(Fragment::new(blocks).unwrap());
        }
    }
    out
}

/// Number of partitions of `n` agents that the fragment reduces to, using the
/// deletion form of the relation.
pub fn count_extensions_by_deletion(fragment: &Fragment, n: usize) -> u64 {
    enumerate_partitions(n)
        .unwrap()
        .iter()
        .filter(|p| reduces_to_by_deletion(fragment, &p.as_fragment()))
        .count() as u64
}

/// Basis-game entry `e^(basis)(at)` recomputed through the deletion form.
pub fn basis_value_by_deletion(basis: &EmbeddedCoalition, at: &EmbeddedCoalition) -> Rational {
    let (p, q) = (basis.partition(), at.partition());
    if p.size() != q.size()
        || !reduces_to_by_deletion(&q.without(at.subject()), &p.without(basis.subject()))
    {
        return Rational::zero();
    }
    let k = at.subject().difference(basis.subject()).len() as i32;
    pow(&int(p.size() as i64 - 1), -k)
}

/// Gauss–Jordan elimination over the rationals; `a` must be square and invertible.
pub fn dense_solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let m = b.len();
    for col in 0..m {
        let pivot = (col..m).find(|&r| !a[r][col].is_zero()).expect("singular");
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        b[col] *= &inv;
        for r in 0..m {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    b
}
