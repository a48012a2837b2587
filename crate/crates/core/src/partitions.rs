//! Set partitions, embedded coalitions and the combinatorial operators on them.
//!
//! Agents are 0-indexed here; the `Display` impls print them 1-indexed, which is
//! also what the game text format uses.
//!
//! The grand-coalition partition `{N}` is stored with a single block, but
//! [`Partition::size`] reports 2 for it: it is treated as `{N, ∅}` with a phantom
//! empty block that is never stored.

use std::fmt;

use crate::error::{Error, Result};

/// Largest agent count the exhaustive enumerations accept.
pub const MAX_AGENTS: usize = 12;

pub(crate) fn check_agent_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_AGENTS {
        return Err(Error::SizeLimit { n, max: MAX_AGENTS });
    }
    Ok(())
}

/// A set of agents, stored as a characteristic bit vector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub fn from_bits(bits: u32) -> Self {
        Coalition(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn singleton(agent: usize) -> Self {
        Coalition(1 << agent)
    }

    /// `{0, …, n−1}`.
    pub fn full(n: usize) -> Self {
        if n >= 32 {
            Coalition(u32::MAX)
        } else {
            Coalition((1u32 << n) - 1)
        }
    }

    pub fn from_agents<I: IntoIterator<Item = usize>>(agents: I) -> Self {
        Coalition(agents.into_iter().fold(0, |acc, a| acc | (1 << a)))
    }

    pub fn contains(self, agent: usize) -> bool {
        agent < 32 && self.0 & (1 << agent) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn with(self, agent: usize) -> Self {
        Coalition(self.0 | (1 << agent))
    }

    pub fn without(self, agent: usize) -> Self {
        Coalition(self.0 & !(1 << agent))
    }

    pub fn union(self, other: Self) -> Self {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        Coalition(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: Self) -> bool {
        self.0 & other.0 == 0
    }

    pub fn min_agent(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize)
    }

    /// Highest agent index plus one; 0 for the empty coalition.
    pub fn span(self) -> usize {
        32 - self.0.leading_zeros() as usize
    }

    pub fn agents(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let agent = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(agent)
        })
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, a) in self.agents().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", a + 1)?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coalition{self}")
    }
}

fn sort_blocks(blocks: &mut [Coalition]) {
    blocks.sort_by_key(|b| b.min_agent());
}

fn check_disjoint_nonempty(blocks: &[Coalition]) -> std::result::Result<Coalition, String> {
    let mut seen = Coalition::EMPTY;
    for &b in blocks {
        if b.is_empty() {
            return Err("empty block".into());
        }
        if !b.is_disjoint(seen) {
            return Err(format!("block {b} overlaps another block"));
        }
        seen = seen.union(b);
    }
    Ok(seen)
}

/// A partition of `{0, …, n−1}` with blocks ordered by their minimum agent.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    blocks: Vec<Coalition>,
}

impl Partition {
    pub fn new(n: usize, mut blocks: Vec<Coalition>) -> Result<Self> {
        check_agent_count(n)?;
        let covered = check_disjoint_nonempty(&blocks).map_err(Error::precondition)?;
        if covered != Coalition::full(n) {
            return Err(Error::precondition(format!(
                "blocks cover {covered}, expected all {n} agents"
            )));
        }
        sort_blocks(&mut blocks);
        Ok(Partition { n, blocks })
    }

    /// Caller guarantees the blocks are a disjoint cover; they are sorted here.
    pub(crate) fn from_blocks_unchecked(n: usize, mut blocks: Vec<Coalition>) -> Self {
        sort_blocks(&mut blocks);
        debug_assert!(check_disjoint_nonempty(&blocks) == Ok(Coalition::full(n)));
        Partition { n, blocks }
    }

    pub fn grand(n: usize) -> Self {
        Partition {
            n,
            blocks: vec![Coalition::full(n)],
        }
    }

    pub fn singletons(n: usize) -> Self {
        Partition {
            n,
            blocks: (0..n).map(Coalition::singleton).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Coalition] {
        &self.blocks
    }

    /// Number of blocks actually stored.
    pub fn stored_len(&self) -> usize {
        self.blocks.len()
    }

    /// Reported size `|P|`; the grand coalition counts its phantom empty block.
    pub fn size(&self) -> usize {
        self.blocks.len().max(2)
    }

    pub fn is_grand(&self) -> bool {
        self.blocks.len() == 1
    }

    pub fn contains_block(&self, coalition: Coalition) -> bool {
        self.blocks.contains(&coalition)
    }

    pub fn block_of(&self, agent: usize) -> Option<Coalition> {
        self.blocks.iter().copied().find(|b| b.contains(agent))
    }

    /// `P₋S`: the remaining blocks, or `{∅}` when `S` is the grand coalition.
    pub fn without(&self, subject: Coalition) -> Fragment {
        let rest: Vec<Coalition> = self
            .blocks
            .iter()
            .copied()
            .filter(|&b| b != subject)
            .collect();
        if rest.is_empty() {
            Fragment::EmptyCoalition
        } else {
            Fragment::Blocks(rest)
        }
    }

    /// All stored blocks viewed as a fragment.
    pub fn as_fragment(&self) -> Fragment {
        Fragment::Blocks(self.blocks.clone())
    }

    /// Transfer targets `P₋S ∪ {∅}` for an agent of `subject`. For the grand
    /// coalition this is just `{∅}`.
    pub fn targets(&self, subject: Coalition) -> Vec<Target> {
        self.blocks
            .iter()
            .copied()
            .filter(|&b| b != subject)
            .map(Target::Existing)
            .chain(std::iter::once(Target::Alone))
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                f.write_str("|")?;
            }
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition({self})")
    }
}

/// A pair `(S, P)` with `S` a non-empty block of `P`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EmbeddedCoalition {
    subject: Coalition,
    partition: Partition,
}

impl EmbeddedCoalition {
    pub fn new(subject: Coalition, partition: Partition) -> Result<Self> {
        if subject.is_empty() {
            return Err(Error::precondition(
                "the empty coalition is not a valid embedded subject",
            ));
        }
        if !partition.contains_block(subject) {
            return Err(Error::precondition(format!(
                "{subject} is not a block of {partition}"
            )));
        }
        Ok(EmbeddedCoalition { subject, partition })
    }

    pub(crate) fn new_unchecked(subject: Coalition, partition: Partition) -> Self {
        debug_assert!(!subject.is_empty() && partition.contains_block(subject));
        EmbeddedCoalition { subject, partition }
    }

    /// `(N, {N, ∅})`.
    pub fn grand(n: usize) -> Self {
        EmbeddedCoalition {
            subject: Coalition::full(n),
            partition: Partition::grand(n),
        }
    }

    pub fn subject(&self) -> Coalition {
        self.subject
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn n(&self) -> usize {
        self.partition.n
    }
}

impl fmt::Display for EmbeddedCoalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {}", self.partition, self.subject)
    }
}

impl fmt::Debug for EmbeddedCoalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "EC({self})")
    }
}

/// Where a transferred agent goes: into an existing block, or alone into a new
/// singleton (the `∅` target).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Target {
    Existing(Coalition),
    Alone,
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Existing(c) => write!(f, "{c}"),
            Target::Alone => f.write_str("{}"),
        }
    }
}

/// A collection of disjoint non-empty blocks that need not cover every agent,
/// or the distinguished fragment `{∅}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Fragment {
    EmptyCoalition,
    Blocks(Vec<Coalition>),
}

impl Fragment {
    pub fn new(mut blocks: Vec<Coalition>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::precondition("a fragment needs at least one block"));
        }
        check_disjoint_nonempty(&blocks).map_err(Error::precondition)?;
        sort_blocks(&mut blocks);
        Ok(Fragment::Blocks(blocks))
    }

    pub fn blocks(&self) -> &[Coalition] {
        match self {
            Fragment::EmptyCoalition => &[],
            Fragment::Blocks(b) => b,
        }
    }

    pub fn block_count(&self) -> usize {
        self.blocks().len()
    }

    pub fn covered(&self) -> Coalition {
        self.blocks()
            .iter()
            .fold(Coalition::EMPTY, |acc, &b| acc.union(b))
    }
}

impl fmt::Display for Fragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fragment::EmptyCoalition => f.write_str("{{}}"),
            Fragment::Blocks(b) => {
                f.write_str("{")?;
                for (k, c) in b.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{c}")?;
                }
                f.write_str("}")
            }
        }
    }
}

/// Lazily walks all partitions of `{0, …, n−1}` in restricted-growth-string
/// lexicographic order.
pub struct PartitionIter {
    n: usize,
    rgs: Vec<usize>,
    // maxima[k] = max(rgs[0..=k])
    maxima: Vec<usize>,
    done: bool,
}

impl PartitionIter {
    pub fn new(n: usize) -> Result<Self> {
        check_agent_count(n)?;
        Ok(PartitionIter {
            n,
            rgs: vec![0; n],
            maxima: vec![0; n],
            done: false,
        })
    }

    fn current(&self) -> Partition {
        let count = self.maxima[self.n - 1] + 1;
        let mut blocks = vec![Coalition::EMPTY; count];
        for (agent, &b) in self.rgs.iter().enumerate() {
            blocks[b] = blocks[b].with(agent);
        }
        // RGS labels blocks in order of first appearance, which is min-agent order.
        Partition { n: self.n, blocks }
    }

    fn advance(&mut self) {
        let mut k = self.n - 1;
        while k > 0 {
            if self.rgs[k] <= self.maxima[k - 1] {
                self.rgs[k] += 1;
                self.maxima[k] = self.maxima[k - 1].max(self.rgs[k]);
                for j in k + 1..self.n {
                    self.rgs[j] = 0;
                    self.maxima[j] = self.maxima[k];
                }
                return;
            }
            k -= 1;
        }
        self.done = true;
    }
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let p = self.current();
        self.advance();
        Some(p)
    }
}

/// Every set partition of `n` agents, once each, in restricted-growth-string order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    Ok(PartitionIter::new(n)?.collect())
}

/// Every embedded coalition of `n` agents: partitions in enumeration order, and
/// within each partition its blocks in canonical order.
pub fn enumerate_embedded(n: usize) -> Result<Vec<EmbeddedCoalition>> {
    let mut out = Vec::new();
    for p in PartitionIter::new(n)? {
        for &s in p.blocks() {
            out.push(EmbeddedCoalition::new_unchecked(s, p.clone()));
        }
    }
    Ok(out)
}

/// `τᵢ^{S,T}(P)`: moves `agent` out of `subject` into `target`.
pub fn transfer(
    partition: &Partition,
    subject: Coalition,
    target: Target,
    agent: usize,
) -> Result<Partition> {
    if !partition.contains_block(subject) {
        return Err(Error::precondition(format!(
            "{subject} is not a block of {partition}"
        )));
    }
    if !subject.contains(agent) {
        return Err(Error::precondition(format!(
            "agent {} is not in {subject}",
            agent + 1
        )));
    }
    if let Target::Existing(t) = target {
        if t == subject || !partition.contains_block(t) {
            return Err(Error::precondition(format!(
                "{t} is not a transfer target for {subject} in {partition}"
            )));
        }
    }
    let mut blocks: Vec<Coalition> = partition
        .blocks
        .iter()
        .copied()
        .filter(|&b| b != subject && Target::Existing(b) != target)
        .collect();
    let rest = subject.without(agent);
    if !rest.is_empty() {
        blocks.push(rest);
    }
    blocks.push(match target {
        Target::Existing(t) => t.with(agent),
        Target::Alone => Coalition::singleton(agent),
    });
    Ok(Partition::from_blocks_unchecked(partition.n, blocks))
}

/// `R1 ⪯ R2`: `R2` reduces to `R1` when every agent of `R1` appears in `R2`,
/// agents together in `R1` are together in `R2`, and agents apart in `R1` are
/// apart in `R2`. `{∅}` reduces from everything and only reduces to itself.
pub fn reduces_to(r1: &Fragment, r2: &Fragment) -> bool {
    let (small, large) = match (r1, r2) {
        (Fragment::EmptyCoalition, _) => return true,
        (_, Fragment::EmptyCoalition) => return false,
        (Fragment::Blocks(a), Fragment::Blocks(b)) => (a, b),
    };
    let mut used = vec![false; large.len()];
    for &block in small {
        // Blocks of `large` are disjoint, so at most one can contain `block`.
        match large.iter().position(|&host| block.is_subset(host)) {
            Some(k) if !used[k] => used[k] = true,
            _ => return false,
        }
    }
    true
}

/// The deletion form of `⪯`: `R1 ⪯ R2` iff deleting some set of agents from
/// `R2` (dropping blocks that vanish) yields exactly `R1`. Brute force over
/// deletion sets; only meant for small fragments.
pub fn reduces_to_by_deletion(r1: &Fragment, r2: &Fragment) -> bool {
    let (target, source) = match (r1, r2) {
        (Fragment::EmptyCoalition, _) => return true,
        // Deleting from {∅} always leaves nothing, and R1 is non-empty.
        (_, Fragment::EmptyCoalition) => return false,
        (Fragment::Blocks(a), Fragment::Blocks(b)) => (a, b),
    };
    let universe = r2.covered().bits();
    let mut deleted = universe;
    loop {
        let del = Coalition::from_bits(deleted);
        let mut remaining: Vec<Coalition> = source
            .iter()
            .filter(|t| !t.is_subset(del))
            .map(|t| t.difference(del))
            .collect();
        sort_blocks(&mut remaining);
        if &remaining == target {
            return true;
        }
        if deleted == 0 {
            return false;
        }
        deleted = (deleted - 1) & universe;
    }
}

/// Number of partitions of `n` agents that the fragment reduces from.
pub fn count_extensions(fragment: &Fragment, n: usize) -> Result<u64> {
    check_agent_count(n)?;
    if fragment.covered().span() > n {
        return Err(Error::precondition(format!(
            "fragment {fragment} mentions agents beyond {n}"
        )));
    }
    Ok(PartitionIter::new(n)?
        .filter(|p| reduces_to(fragment, &p.as_fragment()))
        .count() as u64)
}

/// A bijection on `{0, …, n−1}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct AgentPermutation {
    mapping: Vec<usize>,
}

impl AgentPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut hit = vec![false; mapping.len()];
        for &m in &mapping {
            if m >= mapping.len() || hit[m] {
                return Err(Error::precondition(format!(
                    "{mapping:?} is not a permutation"
                )));
            }
            hit[m] = true;
        }
        Ok(AgentPermutation { mapping })
    }

    pub fn identity(n: usize) -> Self {
        AgentPermutation {
            mapping: (0..n).collect(),
        }
    }

    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..n).collect();
        mapping.swap(a, b);
        AgentPermutation { mapping }
    }

    pub fn n(&self) -> usize {
        self.mapping.len()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn apply(&self, agent: usize) -> usize {
        self.mapping[agent]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &AgentPermutation) -> AgentPermutation {
        AgentPermutation {
            mapping: other.mapping.iter().map(|&a| self.mapping[a]).collect(),
        }
    }

    pub fn inverse(&self) -> AgentPermutation {
        let mut mapping = vec![0; self.mapping.len()];
        for (a, &b) in self.mapping.iter().enumerate() {
            mapping[b] = a;
        }
        AgentPermutation { mapping }
    }

    pub fn apply_coalition(&self, c: Coalition) -> Coalition {
        Coalition::from_agents(c.agents().map(|a| self.mapping[a]))
    }

    pub fn apply_partition(&self, p: &Partition) -> Partition {
        Partition::from_blocks_unchecked(
            p.n,
            p.blocks.iter().map(|&b| self.apply_coalition(b)).collect(),
        )
    }
}

impl fmt::Display for AgentPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, m) in self.mapping.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", m + 1)?;
        }
        f.write_str("]")
    }
}

/// `(σ(S), σ(P))`.
pub fn apply_permutation(sigma: &AgentPermutation, ec: &EmbeddedCoalition) -> EmbeddedCoalition {
    EmbeddedCoalition::new_unchecked(
        sigma.apply_coalition(ec.subject),
        sigma.apply_partition(&ec.partition),
    )
}

/// All `n!` permutations in lexicographic order of their mappings.
pub fn all_permutations(n: usize) -> Vec<AgentPermutation> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![AgentPermutation {
        mapping: current.clone(),
    }];
    loop {
        // next lexicographic permutation
        let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
            return out;
        };
        let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
        current.swap(i - 1, j);
        current[i..].reverse();
        out.push(AgentPermutation {
            mapping: current.clone(),
        });
    }
}
