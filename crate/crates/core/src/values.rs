//! Shapley value, average-approach projections, constant-coalition basis games
//! and the value built by decomposing a game over that basis.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::{embedding_partitions, CharacteristicGame, Game, ValueVector};
use crate::partitions::{enumerate_embedded, reduces_to, Coalition, EmbeddedCoalition, Partition};
use crate::rational::{factorial, format_rational, int, pow, Rational};

/// `Shᵢ(v̂) = Σ_{S∋i} (|S|−1)!(n−|S|)!/n! · (v̂(S) − v̂(S₋ᵢ))`.
pub fn shapley(game: &CharacteristicGame) -> ValueVector {
    let n = game.n();
    let n_fact = Rational::from_integer(factorial(n));
    let weights: Vec<Rational> = (0..=n)
        .map(|s| {
            if s == 0 {
                Rational::zero()
            } else {
                Rational::from_integer(factorial(s - 1) * factorial(n - s)) / &n_fact
            }
        })
        .collect();

    let mut payoff = ValueVector::zero(n);
    for bits in 1..1u32 << n {
        let s = Coalition::from_bits(bits);
        let w = &weights[s.len()];
        for i in s.agents() {
            let marginal = game.get(s) - game.get(s.without(i));
            if !marginal.is_zero() {
                payoff.0[i] += w * marginal;
            }
        }
    }
    payoff
}

/// `{S} ∪ {{j} : j ∉ S}`, or the grand partition when `S = N`.
fn free_partition(n: usize, s: Coalition) -> Partition {
    let mut blocks = vec![s];
    blocks.extend(
        Coalition::full(n)
            .difference(s)
            .agents()
            .map(Coalition::singleton),
    );
    Partition::from_blocks_unchecked(n, blocks)
}

/// `{S, N∖S}`, or the grand partition when `S = N`.
fn mcquillin_partition(n: usize, s: Coalition) -> Partition {
    let rest = Coalition::full(n).difference(s);
    if rest.is_empty() {
        Partition::grand(n)
    } else {
        Partition::from_blocks_unchecked(n, vec![s, rest])
    }
}

/// `v̂^free(S) = v(S, {S} ∪ singletons)`.
pub fn project_free(game: &Game) -> CharacteristicGame {
    let n = game.n();
    CharacteristicGame::from_fn(n, |s| {
        game.get(&EmbeddedCoalition::new_unchecked(s, free_partition(n, s)))
    })
    .expect("game size already validated")
}

/// `v̂^McQ(S) = v(S, {S, N∖S})`; `S = N` reads `v(N, {N, ∅})`.
pub fn project_mcquillin(game: &Game) -> CharacteristicGame {
    let n = game.n();
    CharacteristicGame::from_fn(n, |s| {
        game.get(&EmbeddedCoalition::new_unchecked(
            s,
            mcquillin_partition(n, s),
        ))
    })
    .expect("game size already validated")
}

/// Weights `α(S, P)` over the partitions embedding each coalition. For every
/// non-empty `S` the weights over `{P : S ∈ P}` must sum to 1.
pub trait PartitionWeighting {
    fn weight(&self, subject: Coalition, partition: &Partition) -> Rational;
}

impl<F> PartitionWeighting for F
where
    F: Fn(Coalition, &Partition) -> Rational,
{
    fn weight(&self, subject: Coalition, partition: &Partition) -> Rational {
        self(subject, partition)
    }
}

/// All weight on the partition where every outsider is alone.
pub struct FreeWeighting;

impl PartitionWeighting for FreeWeighting {
    fn weight(&self, subject: Coalition, partition: &Partition) -> Rational {
        let outsiders_alone = partition
            .blocks()
            .iter()
            .all(|&b| b == subject || b.len() == 1);
        if outsiders_alone {
            Rational::one()
        } else {
            Rational::zero()
        }
    }
}

/// All weight on the partition where the outsiders form one block.
pub struct McQuillinWeighting;

impl PartitionWeighting for McQuillinWeighting {
    fn weight(&self, _subject: Coalition, partition: &Partition) -> Rational {
        if partition.stored_len() <= 2 {
            Rational::one()
        } else {
            Rational::zero()
        }
    }
}

/// Equal weight on every partition embedding the coalition.
pub struct UniformWeighting {
    counts: HashMap<Coalition, usize>,
}

impl UniformWeighting {
    pub fn new(n: usize) -> Result<Self> {
        let counts = embedding_partitions(n)?
            .into_iter()
            .map(|(s, ps)| (s, ps.len()))
            .collect();
        Ok(UniformWeighting { counts })
    }
}

impl PartitionWeighting for UniformWeighting {
    fn weight(&self, subject: Coalition, _partition: &Partition) -> Rational {
        match self.counts.get(&subject) {
            Some(&k) => Rational::new(1.into(), k.into()),
            None => Rational::zero(),
        }
    }
}

/// `v̂(S) = Σ_{P∋S} α(S,P)·v(S,P)`. Fails if the weights for some coalition do
/// not sum to 1.
pub fn average_approach<W: PartitionWeighting + ?Sized>(
    game: &Game,
    weighting: &W,
) -> Result<CharacteristicGame> {
    let n = game.n();
    let mut values = vec![Rational::zero(); 1 << n];
    for (s, partitions) in embedding_partitions(n)? {
        let mut total = Rational::zero();
        let mut acc = Rational::zero();
        for p in partitions {
            let w = weighting.weight(s, &p);
            if w.is_zero() {
                continue;
            }
            acc += &w * game.get(&EmbeddedCoalition::new_unchecked(s, p));
            total += w;
        }
        if !total.is_one() {
            return Err(Error::WeightContract(format!(
                "weights for {s} sum to {}",
                format_rational(&total)
            )));
        }
        values[s.bits() as usize] = acc;
    }
    CharacteristicGame::new(n, values)
}

/// `e^(S,P)(S̃,P̃)`: `(|P|−1)^(−|S̃∖S|)` when `P̃₋S̃ ⪯ P₋S` and `|P| = |P̃|`, else 0.
pub fn basis_value(basis: &EmbeddedCoalition, at: &EmbeddedCoalition) -> Rational {
    let p = basis.partition();
    let p_at = at.partition();
    if p.size() != p_at.size() {
        return Rational::zero();
    }
    if !reduces_to(&p_at.without(at.subject()), &p.without(basis.subject())) {
        return Rational::zero();
    }
    let absorbed = at.subject().difference(basis.subject()).len() as i32;
    pow(&int(p.size() as i64 - 1), -absorbed)
}

/// The constant-coalition game `e^(S,P)`.
pub fn basis_game(subject: Coalition, partition: &Partition) -> Result<Game> {
    let basis = EmbeddedCoalition::new(subject, partition.clone())?;
    Game::from_fn(partition.n(), |at| basis_value(&basis, at))
}

/// Coefficients of a game in the constant-coalition basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BasisCoefficients {
    n: usize,
    coefficients: HashMap<EmbeddedCoalition, Rational>,
}

impl BasisCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, ec: &EmbeddedCoalition) -> Rational {
        self.coefficients
            .get(ec)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Non-zero coefficients in embedded-coalition enumeration order.
    pub fn nonzero(&self) -> Vec<(EmbeddedCoalition, Rational)> {
        enumerate_embedded(self.n)
            .expect("size already validated")
            .into_iter()
            .filter_map(|ec| self.coefficients.get(&ec).cloned().map(|a| (ec, a)))
            .collect()
    }

    /// `Σ α(S,P)·e^(S,P)`.
    pub fn reconstruct(&self) -> Game {
        Game::from_fn(self.n, |at| {
            self.coefficients
                .iter()
                .filter(|(b, _)| b.subject().is_subset(at.subject()))
                .fold(Rational::zero(), |acc, (b, a)| acc + a * basis_value(b, at))
        })
        .expect("size already validated")
    }
}

/// Unique basis coefficients of `game`, by forward substitution.
///
/// `e^(S,P)(S̃,P̃) ≠ 0` forces `S ⊆ S̃`, and for `S = S̃` only the diagonal
/// survives, so solving in order of increasing `|S̃|` makes the system
/// unit-triangular.
pub fn decompose(game: &Game) -> BasisCoefficients {
    let n = game.n();
    let mut order = enumerate_embedded(n).expect("game size already validated");
    order.sort_by_key(|ec| ec.subject().len());

    let mut solved: Vec<(EmbeddedCoalition, Rational)> = Vec::new();
    for at in order {
        let mut coefficient = game.get(&at);
        for (basis, alpha) in &solved {
            if !basis.subject().is_subset(at.subject()) {
                continue;
            }
            let e = basis_value(basis, &at);
            if !e.is_zero() {
                coefficient -= alpha * e;
            }
        }
        if !coefficient.is_zero() {
            solved.push((at, coefficient));
        }
    }
    BasisCoefficients {
        n,
        coefficients: solved.into_iter().collect(),
    }
}

/// The value built from the basis: each `e^(S,P)` pays `e^(S,P)(N,{N,∅})/|S|`
/// to every member of `S` and nothing to anyone else, extended linearly.
pub fn value_full_basis(game: &Game) -> ValueVector {
    let n = game.n();
    let grand = EmbeddedCoalition::grand(n);
    let mut payoff = ValueVector::zero(n);
    for (basis, alpha) in decompose(game).coefficients {
        let at_grand = basis_value(&basis, &grand);
        if at_grand.is_zero() {
            continue;
        }
        let share = alpha * at_grand / int(basis.subject().len() as i64);
        for j in basis.subject().agents() {
            payoff.0[j] += &share;
        }
    }
    payoff
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtendedMethod {
    Free,
    McQuillin,
}

/// Shapley value of the chosen projection.
pub fn value_extended(game: &Game, method: ExtendedMethod) -> ValueVector {
    match method {
        ExtendedMethod::Free => shapley(&project_free(game)),
        ExtendedMethod::McQuillin => shapley(&project_mcquillin(game)),
    }
}
