//! Instance-level checks of the value axioms.
//!
//! Every check is exact. A failing [`AxiomReport`] carries a [`Witness`] with
//! the games and quantities involved; [`Witness::reproduces`] replays it.

use std::fmt;

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{linear_combine, Game, ValueVector};
use crate::marginality::{is_null_player, WeightScheme};
use crate::partitions::{
    all_permutations, enumerate_embedded, AgentPermutation, EmbeddedCoalition,
};
use crate::rational::{format_rational, int, Rational};
use crate::values::{basis_game, value_extended, value_full_basis, ExtendedMethod};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Axiom {
    Efficiency,
    Symmetry,
    Linearity,
    NullPlayer,
    McQuillinEquivalence,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Efficiency => "efficiency",
            Axiom::Symmetry => "symmetry",
            Axiom::Linearity => "linearity",
            Axiom::NullPlayer => "null-player",
            Axiom::McQuillinEquivalence => "mcquillin-equivalence",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub enum Witness {
    Efficiency {
        game: Game,
        payoff: ValueVector,
        grand_value: Rational,
    },
    Symmetry {
        game: Game,
        permutation: AgentPermutation,
        /// `φ(σ(v))`
        of_permuted: ValueVector,
        /// `σ(φ(v))`
        permuted: ValueVector,
    },
    Additivity {
        first: Game,
        second: Game,
        of_sum: ValueVector,
        sum_of: ValueVector,
    },
    Homogeneity {
        game: Game,
        factor: Rational,
        of_scaled: ValueVector,
        scaled: ValueVector,
    },
    NullPlayer {
        game: Game,
        scheme: WeightScheme,
        agent: usize,
        payoff: Rational,
    },
    Equivalence {
        game: Game,
        full_basis: ValueVector,
        mcquillin: ValueVector,
    },
}

impl Witness {
    /// Recomputes the witnessed quantities with `value` and reports whether
    /// the violation still shows.
    pub fn reproduces<F: Fn(&Game) -> ValueVector>(&self, value: F) -> bool {
        match self {
            Witness::Efficiency { game, .. } => value(game).total() != game.grand_value(),
            Witness::Symmetry {
                game, permutation, ..
            } => match game.permuted(permutation) {
                Ok(g) => value(&g) != value(game).permuted(permutation),
                Err(_) => false,
            },
            Witness::Additivity { first, second, .. } => {
                value(&(first + second)) != &value(first) + &value(second)
            }
            Witness::Homogeneity { game, factor, .. } => {
                value(&game.scaled(factor)) != value(game).scaled(factor)
            }
            Witness::NullPlayer {
                game,
                scheme,
                agent,
                ..
            } => {
                is_null_player(game, *agent, scheme).unwrap_or(false)
                    && !value(game)[*agent].is_zero()
            }
            Witness::Equivalence { game, .. } => {
                value_full_basis(game) != value_extended(game, ExtendedMethod::McQuillin)
            }
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Efficiency {
                payoff,
                grand_value,
                ..
            } => write!(
                f,
                "total={} grand={}",
                format_rational(&payoff.total()),
                format_rational(grand_value)
            ),
            Witness::Symmetry {
                permutation,
                of_permuted,
                permuted,
                ..
            } => write!(
                f,
                "sigma={permutation} value_of_permuted=({of_permuted}) permuted_value=({permuted})"
            ),
            Witness::Additivity { of_sum, sum_of, .. } => {
                write!(f, "value_of_sum=({of_sum}) sum_of_values=({sum_of})")
            }
            Witness::Homogeneity {
                factor,
                of_scaled,
                scaled,
                ..
            } => write!(
                f,
                "lambda={} value_of_scaled=({of_scaled}) scaled_value=({scaled})",
                format_rational(factor)
            ),
            Witness::NullPlayer {
                scheme,
                agent,
                payoff,
                ..
            } => write!(
                f,
                "agent={} scheme={} payoff={}",
                agent + 1,
                scheme.kind(),
                format_rational(payoff)
            ),
            Witness::Equivalence {
                full_basis,
                mcquillin,
                ..
            } => write!(f, "full_basis=({full_basis}) mcquillin=({mcquillin})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub instance: String,
    pub status: Status,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    fn pass(axiom: Axiom) -> Self {
        AxiomReport {
            axiom,
            instance: "-".into(),
            status: Status::Pass,
            witness: None,
        }
    }

    fn fail(axiom: Axiom, witness: Witness) -> Self {
        AxiomReport {
            axiom,
            instance: "-".into(),
            status: Status::Fail,
            witness: Some(witness),
        }
    }

    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `<axiom> <instance-id> <pass|fail> [witness…]`
impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
        };
        write!(f, "{} {} {}", self.axiom, self.instance, status)?;
        if let Some(w) = &self.witness {
            write!(f, " {w}")?;
        }
        Ok(())
    }
}

/// `Σᵢ φᵢ(v) = v(N, {N, ∅})`.
pub fn check_efficiency<F: Fn(&Game) -> ValueVector>(value: F, game: &Game) -> AxiomReport {
    let payoff = value(game);
    let grand_value = game.grand_value();
    if payoff.total() == grand_value {
        AxiomReport::pass(Axiom::Efficiency)
    } else {
        AxiomReport::fail(
            Axiom::Efficiency,
            Witness::Efficiency {
                game: game.clone(),
                payoff,
                grand_value,
            },
        )
    }
}

/// `φ(σ(v)) = σ(φ(v))`.
pub fn check_symmetry<F: Fn(&Game) -> ValueVector>(
    value: F,
    game: &Game,
    sigma: &AgentPermutation,
) -> Result<AxiomReport> {
    let base = value(game);
    check_symmetry_against(&value, game, &base, sigma)
}

fn check_symmetry_against<F: Fn(&Game) -> ValueVector>(
    value: &F,
    game: &Game,
    base: &ValueVector,
    sigma: &AgentPermutation,
) -> Result<AxiomReport> {
    let of_permuted = value(&game.permuted(sigma)?);
    let permuted = base.permuted(sigma);
    Ok(if of_permuted == permuted {
        AxiomReport::pass(Axiom::Symmetry)
    } else {
        AxiomReport::fail(
            Axiom::Symmetry,
            Witness::Symmetry {
                game: game.clone(),
                permutation: sigma.clone(),
                of_permuted,
                permuted,
            },
        )
    })
}

/// `φ(v₁ + v₂) = φ(v₁) + φ(v₂)` and `φ(λv₁) = λφ(v₁)`.
pub fn check_linearity<F: Fn(&Game) -> ValueVector>(
    value: F,
    first: &Game,
    second: &Game,
    factor: &Rational,
) -> Result<AxiomReport> {
    let one = int(1);
    let sum = linear_combine(&[(one.clone(), first), (one, second)])?;
    let of_sum = value(&sum);
    let value_first = value(first);
    let sum_of = &value_first + &value(second);
    if of_sum != sum_of {
        return Ok(AxiomReport::fail(
            Axiom::Linearity,
            Witness::Additivity {
                first: first.clone(),
                second: second.clone(),
                of_sum,
                sum_of,
            },
        ));
    }
    let of_scaled = value(&first.scaled(factor));
    let scaled = value_first.scaled(factor);
    if of_scaled != scaled {
        return Ok(AxiomReport::fail(
            Axiom::Linearity,
            Witness::Homogeneity {
                game: first.clone(),
                factor: factor.clone(),
                of_scaled,
                scaled,
            },
        ));
    }
    Ok(AxiomReport::pass(Axiom::Linearity))
}

/// Every agent that is null under `scheme` must receive exactly 0.
pub fn check_null_player<F: Fn(&Game) -> ValueVector>(
    value: F,
    game: &Game,
    scheme: &WeightScheme,
) -> Result<AxiomReport> {
    let payoff = value(game);
    for agent in 0..game.n() {
        if !payoff[agent].is_zero() && is_null_player(game, agent, scheme)? {
            return Ok(AxiomReport::fail(
                Axiom::NullPlayer,
                Witness::NullPlayer {
                    game: game.clone(),
                    scheme: scheme.clone(),
                    agent,
                    payoff: payoff[agent].clone(),
                },
            ));
        }
    }
    Ok(AxiomReport::pass(Axiom::NullPlayer))
}

fn check_equivalence(game: &Game) -> AxiomReport {
    let full_basis = value_full_basis(game);
    let mcquillin = value_extended(game, ExtendedMethod::McQuillin);
    if full_basis == mcquillin {
        AxiomReport::pass(Axiom::McQuillinEquivalence)
    } else {
        AxiomReport::fail(
            Axiom::McQuillinEquivalence,
            Witness::Equivalence {
                game: game.clone(),
                full_basis,
                mcquillin,
            },
        )
    }
}

/// Seeded source of random games: each value is `p/q` with `p ∈ [−100, 100]`
/// and `q ∈ {1, 2, 3, 6}`.
pub struct GameSampler {
    seed: u64,
    rng: ChaCha8Rng,
}

impl GameSampler {
    const DENOMINATORS: [i64; 4] = [1, 2, 3, 6];

    pub fn new(seed: u64) -> Self {
        GameSampler {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn rational(&mut self) -> Rational {
        let p = self.rng.random_range(-100..=100i64);
        let q = Self::DENOMINATORS[self.rng.random_range(0..Self::DENOMINATORS.len())];
        Rational::new(p.into(), q.into())
    }

    pub fn nonzero_rational(&mut self) -> Rational {
        loop {
            let r = self.rational();
            if !r.is_zero() {
                return r;
            }
        }
    }

    pub fn game(&mut self, n: usize) -> Result<Game> {
        Game::from_fn(n, |_| self.rational())
    }

    pub fn permutation(&mut self, n: usize) -> AgentPermutation {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.shuffle(&mut self.rng);
        AgentPermutation::new(mapping).expect("shuffle yields a bijection")
    }
}

/// Every constant-coalition game over `n` agents, in enumeration order.
pub fn basis_games(n: usize) -> Result<Vec<(EmbeddedCoalition, Game)>> {
    enumerate_embedded(n)?
        .into_iter()
        .map(|ec| {
            let g = basis_game(ec.subject(), ec.partition())?;
            Ok((ec, g))
        })
        .collect()
}

/// Compares the basis-constructed value with the McQuillin value on every
/// basis game over `n` agents plus `trials` seeded random games. Passes iff
/// they agree exactly everywhere; otherwise the first disagreement is the
/// witness.
pub fn verify_mcquillin_equivalence(n: usize, trials: usize, seed: u64) -> Result<AxiomReport> {
    let instance = format!("n{n}-trials{trials}-seed{seed}");
    for (_, game) in basis_games(n)? {
        let report = check_equivalence(&game);
        if !report.passed() {
            return Ok(report.with_instance(instance));
        }
    }
    let mut sampler = GameSampler::new(seed);
    for _ in 0..trials {
        let report = check_equivalence(&sampler.game(n)?);
        if !report.passed() {
            return Ok(report.with_instance(instance));
        }
    }
    Ok(AxiomReport::pass(Axiom::McQuillinEquivalence).with_instance(instance))
}

/// Parameters for [`run_suite`].
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub sizes: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Permutations sampled per instance when `n` is too large for all `n!`.
    pub sampled_permutations: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            sizes: vec![2, 3, 4],
            trials: 100,
            seed: 0,
            sampled_permutations: 8,
        }
    }
}

/// Largest `n` for which symmetry is checked under every permutation.
pub const EXHAUSTIVE_SYMMETRY_LIMIT: usize = 4;

struct Instance {
    id: String,
    game: Game,
    partner: usize,
    factor: Rational,
    permutations: Vec<AgentPermutation>,
}

fn check_instance<F>(value: &F, inst: &Instance, partner: &Game) -> Result<Vec<AxiomReport>>
where
    F: Fn(&Game) -> ValueVector,
{
    let game = &inst.game;
    let base = value(game);
    let mut out = vec![check_efficiency(value, game).with_instance(&inst.id)];

    let mut symmetry = AxiomReport::pass(Axiom::Symmetry);
    for sigma in &inst.permutations {
        let r = check_symmetry_against(value, game, &base, sigma)?;
        if !r.passed() {
            symmetry = r;
            break;
        }
    }
    out.push(symmetry.with_instance(&inst.id));
    out.push(check_linearity(value, game, partner, &inst.factor)?.with_instance(&inst.id));
    out.push(check_null_player(value, game, &WeightScheme::steady())?.with_instance(&inst.id));
    out.push(check_equivalence(game).with_instance(&inst.id));
    Ok(out)
}

/// Runs Efficiency, Symmetry, Linearity, steady Null-player and the
/// McQuillin equivalence for `value` over every basis game and `trials` random
/// games at each size. Instances are checked on worker threads; the reports
/// come back in instance order.
pub fn run_suite_for<F>(value: F, config: &SuiteConfig) -> Result<Vec<AxiomReport>>
where
    F: Fn(&Game) -> ValueVector + Sync,
{
    let mut sampler = GameSampler::new(config.seed);
    let mut instances: Vec<Instance> = Vec::new();
    for &n in &config.sizes {
        let first = instances.len();
        let all = (n <= EXHAUSTIVE_SYMMETRY_LIMIT).then(|| all_permutations(n));
        let mut games: Vec<(String, Game)> = basis_games(n)?
            .into_iter()
            .enumerate()
            .map(|(k, (_, g))| (format!("n{n}-basis-{k}"), g))
            .collect();
        for k in 0..config.trials {
            games.push((format!("n{n}-random-{k}"), sampler.game(n)?));
        }
        let count = games.len();
        for (k, (id, game)) in games.into_iter().enumerate() {
            let permutations = match &all {
                Some(p) => p.clone(),
                None => (0..config.sampled_permutations)
                    .map(|_| sampler.permutation(n))
                    .collect(),
            };
            instances.push(Instance {
                id,
                game,
                partner: first + (k + 1) % count,
                factor: sampler.nonzero_rational(),
                permutations,
            });
        }
    }

    let workers = std::thread::available_parallelism()
        .map(|w| w.get())
        .unwrap_or(1)
        .min(instances.len().max(1));
    let chunk = instances.len().div_ceil(workers).max(1);
    let instances = &instances;
    let value = &value;
    let results: Vec<Result<Vec<AxiomReport>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..instances.len())
            .step_by(chunk)
            .map(|start| {
                scope.spawn(move || {
                    let mut out = Vec::new();
                    for inst in &instances[start..(start + chunk).min(instances.len())] {
                        out.extend(check_instance(value, inst, &instances[inst.partner].game)?);
                    }
                    Ok(out)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("axiom worker panicked"))
            .collect()
    });

    let mut reports = Vec::new();
    for r in results {
        reports.extend(r?);
    }
    Ok(reports)
}

/// [`run_suite_for`] with the basis-constructed value.
pub fn run_suite(config: &SuiteConfig) -> Result<Vec<AxiomReport>> {
    for &n in &config.sizes {
        crate::partitions::check_agent_count(n)?;
    }
    if config.sizes.is_empty() {
        return Err(Error::precondition("no agent counts to check"));
    }
    run_suite_for(value_full_basis, config)
}
