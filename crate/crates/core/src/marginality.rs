//! Weighted marginal contributions for games with externalities.
//!
//! The marginal contribution of agent `i` to `(S, P)` is a weighted sum over
//! transfer targets `T ∈ P₋S ∪ {∅}` of the elementary contributions
//! `v(S, P) − v(S₋ᵢ, τᵢ^{S,T}(P))`. The schemes differ only in the weights:
//!
//! | scheme  | existing block `T` | new singleton `∅` |
//! |---------|--------------------|-------------------|
//! | bolger  | 1                  | 1                 |
//! | free    | 0                  | 1                 |
//! | steady  | 1                  | 0                 |
//! | huyang  | 1                  | 1 + r             |
//!
//! At the grand coalition `(N, {N, ∅})` the only target is `∅`, and every
//! named scheme puts weight 1 on it.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::game::Game;
use crate::partitions::{
    count_extensions, enumerate_embedded, transfer, Coalition, EmbeddedCoalition, Fragment,
    Partition, Target,
};
use crate::rational::Rational;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SchemeKind {
    Bolger,
    Free,
    Steady,
    HuYang,
    Custom,
}

impl SchemeKind {
    pub const NAMED: [SchemeKind; 4] = [
        SchemeKind::Bolger,
        SchemeKind::Free,
        SchemeKind::Steady,
        SchemeKind::HuYang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Bolger => "bolger",
            SchemeKind::Free => "free",
            SchemeKind::Steady => "steady",
            SchemeKind::HuYang => "huyang",
            SchemeKind::Custom => "custom",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bolger" => Ok(SchemeKind::Bolger),
            "free" => Ok(SchemeKind::Free),
            "steady" | "full" => Ok(SchemeKind::Steady),
            "huyang" | "hu-yang" => Ok(SchemeKind::HuYang),
            other => Err(Error::InvalidScheme(format!("unknown scheme `{other}`"))),
        }
    }
}

/// `(agent, S, P, T) ↦ α`.
pub type CustomWeight = dyn Fn(usize, Coalition, &Partition, Target) -> Rational + Send + Sync;

/// A family of transfer weights, optionally normalized to sum to 1 over the
/// targets of each `(i, S, P)`.
#[derive(Clone)]
pub struct WeightScheme {
    kind: SchemeKind,
    normalized: bool,
    custom: Option<Arc<CustomWeight>>,
}

impl fmt::Debug for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightScheme")
            .field("kind", &self.kind)
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl WeightScheme {
    fn named_unchecked(kind: SchemeKind) -> Self {
        WeightScheme {
            kind,
            normalized: false,
            custom: None,
        }
    }

    pub fn bolger() -> Self {
        Self::named_unchecked(SchemeKind::Bolger)
    }

    pub fn free() -> Self {
        Self::named_unchecked(SchemeKind::Free)
    }

    pub fn steady() -> Self {
        Self::named_unchecked(SchemeKind::Steady)
    }

    pub fn huyang() -> Self {
        Self::named_unchecked(SchemeKind::HuYang)
    }

    pub fn named(kind: SchemeKind) -> Result<Self> {
        if kind == SchemeKind::Custom {
            return Err(Error::InvalidScheme(
                "custom schemes need a weight function".into(),
            ));
        }
        Ok(Self::named_unchecked(kind))
    }

    /// A user-supplied scheme for games over `n` agents. Rejected if it puts
    /// zero or negative weight on the `∅` target at the grand coalition, since
    /// then no agent could ever contribute to `v(N, {N, ∅})`.
    pub fn custom<F>(n: usize, weight: F) -> Result<Self>
    where
        F: Fn(usize, Coalition, &Partition, Target) -> Rational + Send + Sync + 'static,
    {
        let grand = Partition::grand(n);
        for i in 0..n {
            let w = weight(i, Coalition::full(n), &grand, Target::Alone);
            if !w.is_positive() {
                return Err(Error::InvalidScheme(format!(
                    "grand-coalition weight on the singleton target must be positive (agent {})",
                    i + 1
                )));
            }
        }
        Ok(WeightScheme {
            kind: SchemeKind::Custom,
            normalized: false,
            custom: Some(Arc::new(weight)),
        })
    }

    pub fn with_normalization(mut self, normalized: bool) -> Self {
        self.normalized = normalized;
        self
    }

    pub fn kind(&self) -> SchemeKind {
        self.kind
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Unnormalized `α(i, S, P, T)`.
    pub fn raw_weight(
        &self,
        agent: usize,
        subject: Coalition,
        partition: &Partition,
        target: Target,
    ) -> Result<Rational> {
        let one = || Rational::from_integer(1.into());
        let w = match (self.kind, target) {
            (SchemeKind::Custom, _) => {
                let f = self
                    .custom
                    .as_ref()
                    .expect("custom scheme carries a function");
                f(agent, subject, partition, target)
            }
            _ if partition.is_grand() => one(),
            (SchemeKind::Bolger, _) => one(),
            (SchemeKind::Free, Target::Alone) | (SchemeKind::Steady, Target::Existing(_)) => one(),
            (SchemeKind::Free, _) | (SchemeKind::Steady, _) => Rational::zero(),
            (SchemeKind::HuYang, _) => {
                huyang_weight(agent, subject, partition, target, partition.n())?
            }
        };
        if w.is_negative() {
            return Err(Error::InvalidScheme(format!(
                "negative weight at agent {}, {subject} in {partition}",
                agent + 1
            )));
        }
        Ok(w)
    }

    /// Weights for every target of `(i, S, P)`, normalized if requested.
    pub fn weights(
        &self,
        agent: usize,
        subject: Coalition,
        partition: &Partition,
    ) -> Result<Vec<(Target, Rational)>> {
        let mut out = partition
            .targets(subject)
            .into_iter()
            .map(|t| Ok((t, self.raw_weight(agent, subject, partition, t)?)))
            .collect::<Result<Vec<_>>>()?;
        if self.normalized {
            let total = out.iter().fold(Rational::zero(), |acc, (_, w)| acc + w);
            if total.is_zero() {
                return Err(Error::InvalidScheme(format!(
                    "all weights vanish at agent {}, {subject} in {partition}",
                    agent + 1
                )));
            }
            for (_, w) in &mut out {
                *w /= &total;
            }
        }
        Ok(out)
    }
}

fn check_embedding(
    game: &Game,
    agent: usize,
    subject: Coalition,
    partition: &Partition,
) -> Result<()> {
    if partition.n() != game.n() {
        return Err(Error::Dimension {
            expected: game.n(),
            found: partition.n(),
        });
    }
    EmbeddedCoalition::new(subject, partition.clone())?;
    if !subject.contains(agent) {
        return Err(Error::precondition(format!(
            "agent {} is not in {subject}",
            agent + 1
        )));
    }
    Ok(())
}

/// `v(S, P) − v(S₋ᵢ, τᵢ^{S,T}(P))`. When `S = {i}` the subtrahend is `v(∅, ·) = 0`.
pub fn elementary_mc(
    game: &Game,
    agent: usize,
    subject: Coalition,
    partition: &Partition,
    target: Target,
) -> Result<Rational> {
    check_embedding(game, agent, subject, partition)?;
    let moved = transfer(partition, subject, target, agent)?;
    Ok(game.value(subject, partition)? - game.value(subject.without(agent), &moved)?)
}

/// `Σ_T α(i,S,P,T)·(v(S,P) − v(S₋ᵢ, τᵢ^{S,T}(P)))`.
pub fn marginal_contribution(
    game: &Game,
    agent: usize,
    subject: Coalition,
    partition: &Partition,
    scheme: &WeightScheme,
) -> Result<Rational> {
    check_embedding(game, agent, subject, partition)?;
    let mut total = Rational::zero();
    for (target, w) in scheme.weights(agent, subject, partition)? {
        if w.is_zero() {
            continue;
        }
        total += w * elementary_mc(game, agent, subject, partition, target)?;
    }
    Ok(total)
}

/// An agent's contributions to every embedded coalition containing it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarginalVector {
    pub agent: usize,
    pub entries: Vec<(EmbeddedCoalition, Rational)>,
}

impl MarginalVector {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|(_, x)| x.is_zero())
    }

    pub fn get(&self, ec: &EmbeddedCoalition) -> Option<&Rational> {
        self.entries.iter().find(|(e, _)| e == ec).map(|(_, x)| x)
    }
}

fn embeddings_of(n: usize, agent: usize) -> Result<Vec<EmbeddedCoalition>> {
    if agent >= n {
        return Err(Error::precondition(format!(
            "agent {} out of range 1..={n}",
            agent + 1
        )));
    }
    Ok(enumerate_embedded(n)?
        .into_iter()
        .filter(|ec| ec.subject().contains(agent))
        .collect())
}

pub fn mc_vector(game: &Game, agent: usize, scheme: &WeightScheme) -> Result<MarginalVector> {
    let entries = embeddings_of(game.n(), agent)?
        .into_iter()
        .map(|ec| {
            let x = marginal_contribution(game, agent, ec.subject(), ec.partition(), scheme)?;
            Ok((ec, x))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MarginalVector { agent, entries })
}

/// True iff the agent's whole marginal vector under `scheme` is zero.
pub fn is_null_player(game: &Game, agent: usize, scheme: &WeightScheme) -> Result<bool> {
    Ok(mc_vector(game, agent, scheme)?.is_zero())
}

/// The stricter sense: every elementary contribution of the agent is zero.
pub fn is_null_player_elementary(game: &Game, agent: usize) -> Result<bool> {
    for ec in embeddings_of(game.n(), agent)? {
        for target in ec.partition().targets(ec.subject()) {
            if !elementary_mc(game, agent, ec.subject(), ec.partition(), target)?.is_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `τᵢ^{S,T}(P) ∖ {S₋ᵢ}`: the blocks left after the transfer, minus what
/// remains of `S`. When `S = {i}` nothing is removed.
pub fn destination_fragment(
    partition: &Partition,
    subject: Coalition,
    target: Target,
    agent: usize,
) -> Result<Fragment> {
    let moved = transfer(partition, subject, target, agent)?;
    let rest = subject.without(agent);
    Fragment::new(
        moved
            .blocks()
            .iter()
            .copied()
            .filter(|&b| b != rest)
            .collect(),
    )
}

type ExtensionKey = (usize, usize, usize);

fn extension_memo() -> &'static RwLock<HashMap<ExtensionKey, u64>> {
    static MEMO: OnceLock<RwLock<HashMap<ExtensionKey, u64>>> = OnceLock::new();
    MEMO.get_or_init(Default::default)
}

/// [`count_extensions`] memoized on `(n, block count, covered agents)`, which
/// is all the count depends on.
pub fn count_extensions_cached(fragment: &Fragment, n: usize) -> Result<u64> {
    let key = (n, fragment.block_count(), fragment.covered().len());
    if let Some(&hit) = extension_memo().read().expect("memo lock").get(&key) {
        return Ok(hit);
    }
    let count = count_extensions(fragment, n)?;
    extension_memo()
        .write()
        .expect("memo lock")
        .insert(key, count);
    Ok(count)
}

/// Hu–Yang weight: 1 for an existing block, and for the `∅` target the ratio
/// of extension counts of the "alone" and "joined" destination fragments.
pub fn huyang_weight(
    agent: usize,
    subject: Coalition,
    partition: &Partition,
    target: Target,
    n: usize,
) -> Result<Rational> {
    if partition.n() != n {
        return Err(Error::Dimension {
            expected: n,
            found: partition.n(),
        });
    }
    EmbeddedCoalition::new(subject, partition.clone())?;
    // validates agent and target
    transfer(partition, subject, target, agent)?;

    let one = Rational::from_integer(1.into());
    if matches!(target, Target::Existing(_)) || partition.is_grand() {
        return Ok(one);
    }
    let alone = destination_fragment(partition, subject, Target::Alone, agent)?;
    let joined_target = partition
        .blocks()
        .iter()
        .copied()
        .find(|&b| b != subject)
        .expect("non-grand partition has another block");
    let joined = destination_fragment(partition, subject, Target::Existing(joined_target), agent)?;
    let numer = count_extensions_cached(&alone, n)?;
    let denom = count_extensions_cached(&joined, n)?;
    Ok(Rational::new(numer.into(), denom.into()))
}

/// The political-party family: parties `S⁽¹⁾, …, S⁽ᵐ⁾` occupy the first
/// agents in order, and one independent agent `i` comes last. With
/// `P = {S⁽ʲ⁾} ∪ {{i}}` and `P⁽ʲ⁾` the partition where `i` has joined `S⁽ʲ⁾`:
///
/// - `v(S⁽ʲ⁾, P) = bⱼ` and `v({i}, P) = 0`
/// - `v(S⁽ʲ⁾ ∪ {i}, P⁽ʲ⁾) = bⱼ + (m − 1)`
/// - `v(S⁽ᵏ⁾, P⁽ʲ⁾) = bₖ − 1` for `k ≠ j`
///
/// and every other embedded coalition is worth 0.
#[derive(Clone, Debug)]
pub struct PartyGame {
    pub game: Game,
    pub parties: Vec<Coalition>,
    pub independent: usize,
}

impl PartyGame {
    pub fn new(sizes: &[usize], base: &[Rational]) -> Result<Self> {
        let m = sizes.len();
        if m == 0 {
            return Err(Error::precondition("need at least one party"));
        }
        if base.len() != m {
            return Err(Error::precondition(format!(
                "{} base values for {m} parties",
                base.len()
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::precondition("party sizes must be positive"));
        }
        let n = sizes.iter().sum::<usize>() + 1;
        crate::partitions::check_agent_count(n)?;

        let mut parties = Vec::with_capacity(m);
        let mut next = 0;
        for &size in sizes {
            parties.push(Coalition::from_agents(next..next + size));
            next += size;
        }
        let independent = n - 1;
        let alone = Coalition::singleton(independent);

        let mut game = Game::zero(n)?;
        let mut split = parties.clone();
        split.push(alone);
        let split = Partition::new(n, split)?;
        for (j, &party) in parties.iter().enumerate() {
            game.set(
                EmbeddedCoalition::new(party, split.clone())?,
                base[j].clone(),
            )?;
        }
        let gain = Rational::from_integer((m as i64 - 1).into());
        let loss = Rational::from_integer(1.into());
        for j in 0..m {
            let joined = transfer(&split, alone, Target::Existing(parties[j]), independent)?;
            for (k, &party) in parties.iter().enumerate() {
                let (subject, value) = if k == j {
                    (party.with(independent), &base[k] + &gain)
                } else {
                    (party, &base[k] - &loss)
                };
                game.set(EmbeddedCoalition::new(subject, joined.clone())?, value)?;
            }
        }
        Ok(PartyGame {
            game,
            parties,
            independent,
        })
    }

    /// `(S⁽ʲ⁾ ∪ {i}, P⁽ʲ⁾)` for party `j` (0-indexed).
    pub fn joined(&self, party: usize) -> EmbeddedCoalition {
        let subject = self.parties[party].with(self.independent);
        let mut blocks: Vec<Coalition> = self.parties.clone();
        blocks[party] = subject;
        EmbeddedCoalition::new_unchecked(
            subject,
            Partition::from_blocks_unchecked(self.game.n(), blocks),
        )
    }
}
