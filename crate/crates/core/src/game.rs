//! Partition-function games, characteristic-function games and payoff vectors.

use std::collections::HashMap;
use std::fmt;
use std::ops::Index;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::partitions::{
    apply_permutation, check_agent_count, enumerate_embedded, enumerate_partitions,
    AgentPermutation, Coalition, EmbeddedCoalition, Partition,
};
use crate::rational::{format_rational, parse_rational, Rational};

/// A game in partition-function form. Every embedded coalition has a value;
/// zero values are not stored.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    n: usize,
    values: HashMap<EmbeddedCoalition, Rational>,
}

impl Game {
    pub fn zero(n: usize) -> Result<Self> {
        check_agent_count(n)?;
        Ok(Game {
            n,
            values: HashMap::new(),
        })
    }

    /// Builds a game by evaluating `f` on every embedded coalition.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(&EmbeddedCoalition) -> Rational,
    {
        let mut game = Game::zero(n)?;
        for ec in enumerate_embedded(n)? {
            let value = f(&ec);
            game.insert(ec, value);
        }
        Ok(game)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn insert(&mut self, ec: EmbeddedCoalition, value: Rational) {
        if value.is_zero() {
            self.values.remove(&ec);
        } else {
            self.values.insert(ec, value);
        }
    }

    pub fn set(&mut self, ec: EmbeddedCoalition, value: Rational) -> Result<()> {
        if ec.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: ec.n(),
            });
        }
        self.insert(ec, value);
        Ok(())
    }

    pub fn get(&self, ec: &EmbeddedCoalition) -> Rational {
        self.values.get(ec).cloned().unwrap_or_else(Rational::zero)
    }

    /// `v(S, P)`, with `v(∅, P) = 0`.
    pub fn value(&self, subject: Coalition, partition: &Partition) -> Result<Rational> {
        if partition.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: partition.n(),
            });
        }
        if subject.is_empty() {
            return Ok(Rational::zero());
        }
        if !partition.contains_block(subject) {
            return Err(Error::InvalidQuery(format!(
                "{subject} is not a block of {partition}"
            )));
        }
        Ok(self.get(&EmbeddedCoalition::new_unchecked(
            subject,
            partition.clone(),
        )))
    }

    /// `v(N, {N, ∅})`.
    pub fn grand_value(&self) -> Rational {
        self.get(&EmbeddedCoalition::grand(self.n))
    }

    /// Non-zero entries, in no particular order.
    pub fn nonzero(&self) -> impl Iterator<Item = (&EmbeddedCoalition, &Rational)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, factor: &Rational) -> Game {
        let mut out = Game {
            n: self.n,
            values: HashMap::new(),
        };
        for (ec, v) in &self.values {
            out.insert(ec.clone(), v * factor);
        }
        out
    }

    /// `σ(v)`, defined by `σ(v)(S, P) = v(σ(S), σ(P))`.
    pub fn permuted(&self, sigma: &AgentPermutation) -> Result<Game> {
        if sigma.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                found: sigma.n(),
            });
        }
        // σ(v) takes value v(x) at σ⁻¹(x).
        let inverse = sigma.inverse();
        let mut out = Game {
            n: self.n,
            values: HashMap::new(),
        };
        for (ec, v) in &self.values {
            out.insert(apply_permutation(&inverse, ec), v.clone());
        }
        Ok(out)
    }

    /// True iff some coalition takes different values in two partitions.
    pub fn has_externalities(&self) -> bool {
        let mut seen: HashMap<Coalition, Rational> = HashMap::new();
        for ec in enumerate_embedded(self.n).expect("game size already validated") {
            let v = self.get(&ec);
            match seen.get(&ec.subject()) {
                Some(prev) if *prev != v => return true,
                Some(_) => {}
                None => {
                    seen.insert(ec.subject(), v);
                }
            }
        }
        false
    }
}

impl std::ops::Add for &Game {
    type Output = Game;

    /// Panics if the agent counts differ; use [`linear_combine`] for a checked sum.
    fn add(self, rhs: &Game) -> Game {
        assert_eq!(self.n, rhs.n, "adding games over different agent sets");
        let mut out = self.clone();
        for (ec, v) in &rhs.values {
            let sum = out.get(ec) + v;
            out.insert(ec.clone(), sum);
        }
        out
    }
}

/// `Σ λₖ·vₖ`, pointwise.
pub fn linear_combine(terms: &[(Rational, &Game)]) -> Result<Game> {
    let Some((_, first)) = terms.first() else {
        return Err(Error::precondition(
            "linear_combine needs at least one game",
        ));
    };
    let n = first.n;
    let mut out = Game::zero(n)?;
    for (coeff, game) in terms {
        if game.n != n {
            return Err(Error::Dimension {
                expected: n,
                found: game.n,
            });
        }
        for (ec, v) in &game.values {
            let sum = out.get(ec) + coeff * v;
            out.insert(ec.clone(), sum);
        }
    }
    Ok(out)
}

/// A game without externalities, `v̂ : 2^N → ℚ` with `v̂(∅) = 0`. Indexed by
/// the coalition bit vector.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CharacteristicGame {
    n: usize,
    values: Vec<Rational>,
}

impl CharacteristicGame {
    pub fn new(n: usize, values: Vec<Rational>) -> Result<Self> {
        check_agent_count(n)?;
        if values.len() != 1 << n {
            return Err(Error::precondition(format!(
                "expected {} coalition values, got {}",
                1 << n,
                values.len()
            )));
        }
        if !values[0].is_zero() {
            return Err(Error::precondition("the empty coalition must have value 0"));
        }
        Ok(CharacteristicGame { n, values })
    }

    /// `f` is not called for the empty coalition.
    pub fn from_fn<F>(n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(Coalition) -> Rational,
    {
        check_agent_count(n)?;
        let values = (0..1u32 << n)
            .map(|bits| {
                if bits == 0 {
                    Rational::zero()
                } else {
                    f(Coalition::from_bits(bits))
                }
            })
            .collect();
        Ok(CharacteristicGame { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, coalition: Coalition) -> &Rational {
        &self.values[coalition.bits() as usize]
    }

    /// Embeds the game as a partition-function game with `v(S, P) = v̂(S)`.
    pub fn lift(&self) -> Game {
        Game::from_fn(self.n, |ec| self.get(ec.subject()).clone())
            .expect("characteristic game size already validated")
    }
}

/// See [`CharacteristicGame::lift`].
pub fn lift_characteristic(game: &CharacteristicGame) -> Game {
    game.lift()
}

/// One payoff per agent.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ValueVector(pub Vec<Rational>);

impl ValueVector {
    pub fn zero(n: usize) -> Self {
        ValueVector(vec![Rational::zero(); n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.0.iter().fold(Rational::zero(), |acc, x| acc + x)
    }

    /// `σ(φ) = (φ_{σ(i)})ᵢ`.
    pub fn permuted(&self, sigma: &AgentPermutation) -> ValueVector {
        ValueVector(
            (0..self.0.len())
                .map(|i| self.0[sigma.apply(i)].clone())
                .collect(),
        )
    }

    pub fn scaled(&self, factor: &Rational) -> ValueVector {
        ValueVector(self.0.iter().map(|x| x * factor).collect())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.0.iter()
    }
}

impl std::ops::Add for &ValueVector {
    type Output = ValueVector;

    fn add(self, rhs: &ValueVector) -> ValueVector {
        ValueVector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Index<usize> for ValueVector {
    type Output = Rational;

    fn index(&self, agent: usize) -> &Rational {
        &self.0[agent]
    }
}

impl fmt::Display for ValueVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}: {}", i + 1, format_rational(x))?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Text format
//
//     agents <n>
//     # comment
//     <partition> : <coalition> = <rational>
//
// Partitions are `|`-joined blocks `{a,b,...}` of 1-indexed agents.
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum ParseMode {
    /// Unlisted embedded coalitions are 0.
    #[default]
    Permissive,
    /// Every embedded coalition must be listed exactly once.
    Strict,
}

pub(crate) fn parse_coalition(text: &str, n: usize) -> std::result::Result<Coalition, String> {
    let inner = text
        .trim()
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .ok_or_else(|| format!("expected a block like {{1,2}}, found `{}`", text.trim()))?;
    let mut coalition = Coalition::EMPTY;
    if inner.trim().is_empty() {
        return Ok(coalition);
    }
    for tok in inner.split(',') {
        let agent: usize = tok
            .trim()
            .parse()
            .map_err(|_| format!("bad agent `{}`", tok.trim()))?;
        if agent == 0 || agent > n {
            return Err(format!("agent {agent} out of range 1..={n}"));
        }
        if coalition.contains(agent - 1) {
            return Err(format!("agent {agent} repeated"));
        }
        coalition = coalition.with(agent - 1);
    }
    Ok(coalition)
}

pub(crate) fn parse_partition(text: &str, n: usize) -> std::result::Result<Partition, String> {
    let blocks = text
        .split('|')
        .map(|b| parse_coalition(b, n))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Partition::new(n, blocks).map_err(|e| match e {
        Error::Precondition(m) => m,
        other => other.to_string(),
    })
}

/// Parses an embedded coalition written `<partition> : <coalition>`.
pub fn parse_embedded(text: &str, n: usize) -> Result<EmbeddedCoalition> {
    let (p, s) = text.split_once(':').ok_or_else(|| {
        Error::precondition(format!(
            "expected `<partition> : <coalition>`, found `{text}`"
        ))
    })?;
    let partition = parse_partition(p, n).map_err(Error::Precondition)?;
    let subject = parse_coalition(s, n).map_err(Error::Precondition)?;
    EmbeddedCoalition::new(subject, partition)
}

pub fn parse_game(text: &str, mode: ParseMode) -> Result<Game> {
    let mut game: Option<Game> = None;
    let mut seen: HashMap<EmbeddedCoalition, usize> = HashMap::new();
    let mut last_line = 0;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(current) = game.as_mut() else {
            let n = line
                .strip_prefix("agents")
                .map(str::trim)
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| Error::parse(line_no, "expected `agents <n>` header"))?;
            game = Some(Game::zero(n).map_err(|e| Error::parse(line_no, e.to_string()))?);
            continue;
        };
        let n = current.n;

        let (lhs, rhs) = line.split_once('=').ok_or_else(|| {
            Error::parse(line_no, "expected `<partition> : <coalition> = <value>`")
        })?;
        let (p_text, s_text) = lhs
            .split_once(':')
            .ok_or_else(|| Error::parse(line_no, "expected `<partition> : <coalition>`"))?;
        let partition = parse_partition(p_text, n).map_err(|m| Error::parse(line_no, m))?;
        let subject = parse_coalition(s_text, n).map_err(|m| Error::parse(line_no, m))?;
        if subject.is_empty() || !partition.contains_block(subject) {
            return Err(Error::parse(
                line_no,
                format!("{subject} is not a block of {partition}"),
            ));
        }
        let value = parse_rational(rhs)
            .ok_or_else(|| Error::parse(line_no, format!("bad rational `{}`", rhs.trim())))?;
        let ec = EmbeddedCoalition::new_unchecked(subject, partition);
        if let Some(prev) = seen.insert(ec.clone(), line_no) {
            return Err(Error::parse(
                line_no,
                format!("duplicate entry for {ec} (first on line {prev})"),
            ));
        }
        current.insert(ec, value);
    }

    let game = game.ok_or_else(|| Error::parse(last_line.max(1), "missing `agents <n>` header"))?;
    if mode == ParseMode::Strict {
        for ec in enumerate_embedded(game.n)? {
            if !seen.contains_key(&ec) {
                return Err(Error::parse(
                    last_line,
                    format!("strict mode: no entry for {ec}"),
                ));
            }
        }
    }
    Ok(game)
}

/// Every embedded coalition, zeros included, in enumeration order.
pub fn serialize_game(game: &Game) -> String {
    let mut out = format!("agents {}\n", game.n);
    for ec in enumerate_embedded(game.n).expect("game size already validated") {
        out.push_str(&format!("{ec} = {}\n", format_rational(&game.get(&ec))));
    }
    out
}

/// For each non-empty coalition, the partitions that contain it as a block.
pub(crate) fn embedding_partitions(n: usize) -> Result<HashMap<Coalition, Vec<Partition>>> {
    let mut by_subject: HashMap<Coalition, Vec<Partition>> = HashMap::new();
    for p in enumerate_partitions(n)? {
        for &s in p.blocks() {
            by_subject.entry(s).or_default().push(p.clone());
        }
    }
    Ok(by_subject)
}
