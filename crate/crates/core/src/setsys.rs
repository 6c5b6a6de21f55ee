//! Coalitions, set systems and the closure operator they induce.
//!
//! A coalition over `n` players is an `n`-bit mask: the player labelled `i`
//! (1-based) occupies bit `i - 1`. A set system is a `2^n`-bit mask whose bit
//! `m` is set iff the coalition with mask `m` belongs to the system. Both are
//! serialized as decimal integers.

use std::fmt;

use rand::Rng as _;

use crate::error::{GameError, Result};
use crate::rng::{self, Rng};

/// Largest supported player count (membership masks are `u128`).
pub const MAX_PLAYERS: usize = 7;

/// Largest player count for which exhaustive enumeration is allowed.
pub const EXHAUSTIVE_LIMIT: usize = 4;

/// A subset of the player set, as a bitmask.
///
/// Methods taking an `index` are 0-based (bit position); `from_players` and
/// `players` use the 1-based player labels.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition(u32);

impl Coalition {
    pub const EMPTY: Coalition = Coalition(0);

    pub const fn from_mask(mask: u32) -> Self {
        Coalition(mask)
    }

    pub const fn mask(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn grand(n: usize) -> Self {
        Coalition(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(index: usize) -> Self {
        Coalition(1 << index)
    }

    /// Encodes 1-based player labels.
    pub fn from_players(players: &[usize], n: usize) -> Result<Self> {
        let mut mask = 0u32;
        for &p in players {
            if p == 0 || p > n {
                return Err(GameError::input(format!("player {p} outside 1..={n}")));
            }
            let bit = 1 << (p - 1);
            if mask & bit != 0 {
                return Err(GameError::input(format!("player {p} listed twice")));
            }
            mask |= bit;
        }
        Ok(Coalition(mask))
    }

    /// Sorted 1-based player labels.
    pub fn players(self) -> Vec<usize> {
        self.indices().map(|i| i + 1).collect()
    }

    /// Sorted 0-based player indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mask = self.0;
        (0..32).filter(move |i| mask >> i & 1 == 1)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 >> index & 1 == 1
    }

    pub fn is_subset_of(self, other: Coalition) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn union(self, other: Coalition) -> Coalition {
        Coalition(self.0 | other.0)
    }

    pub fn intersection(self, other: Coalition) -> Coalition {
        Coalition(self.0 & other.0)
    }

    pub fn difference(self, other: Coalition) -> Coalition {
        Coalition(self.0 & !other.0)
    }

    pub fn with(self, index: usize) -> Coalition {
        Coalition(self.0 | 1 << index)
    }

    pub fn without(self, index: usize) -> Coalition {
        Coalition(self.0 & !(1 << index))
    }

    /// Drops bit `index` and shifts the higher bits down by one.
    pub fn remove_index(self, index: usize) -> Coalition {
        let low = self.0 & ((1 << index) - 1);
        let high = (self.0 >> (index + 1)) << index;
        Coalition(low | high)
    }

    /// All subsets, from `self` down to the empty coalition.
    pub fn subsets(self) -> Subsets {
        Subsets {
            full: self.0,
            next: Some(self.0),
        }
    }

    /// Subsets other than `self`.
    pub fn proper_subsets(self) -> impl Iterator<Item = Coalition> {
        self.subsets().skip(1)
    }
}

impl fmt::Debug for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Coalition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, p) in self.players().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

/// Submask enumeration in decreasing mask order.
pub struct Subsets {
    full: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = Coalition;

    fn next(&mut self) -> Option<Coalition> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & self.full)
        };
        Some(Coalition(cur))
    }
}

/// Every coalition of `n` players in ascending mask order.
pub fn all_coalitions(n: usize) -> impl Iterator<Item = Coalition> {
    (0..1u32 << n).map(Coalition)
}

/// A family of known coalitions; always contains the empty coalition.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetSystem {
    n: usize,
    members: u128,
}

fn full_membership(n: usize) -> u128 {
    if n == MAX_PLAYERS {
        u128::MAX
    } else {
        (1u128 << (1 << n)) - 1
    }
}

fn check_players(n: usize) -> Result<()> {
    if n == 0 || n > MAX_PLAYERS {
        return Err(GameError::input(format!(
            "player count {n} outside 1..={MAX_PLAYERS}"
        )));
    }
    Ok(())
}

impl SetSystem {
    /// The system `{∅}`.
    pub fn empty(n: usize) -> Result<Self> {
        check_players(n)?;
        Ok(SetSystem { n, members: 1 })
    }

    pub fn power_set(n: usize) -> Result<Self> {
        check_players(n)?;
        Ok(SetSystem {
            n,
            members: full_membership(n),
        })
    }

    /// Decodes a membership mask; the empty coalition is forced in.
    pub fn from_mask(n: usize, mask: u128) -> Result<Self> {
        check_players(n)?;
        if mask & !full_membership(n) != 0 {
            return Err(GameError::input(format!(
                "system mask {mask} has bits beyond 2^{}",
                1 << n
            )));
        }
        Ok(SetSystem {
            n,
            members: mask | 1,
        })
    }

    pub fn from_coalitions(n: usize, coalitions: impl IntoIterator<Item = Coalition>) -> Result<Self> {
        let mut system = SetSystem::empty(n)?;
        let grand = Coalition::grand(n);
        for c in coalitions {
            if !c.is_subset_of(grand) {
                return Err(GameError::input(format!(
                    "coalition mask {} out of range for {n} players",
                    c.mask()
                )));
            }
            system.members |= 1 << c.mask();
        }
        Ok(system)
    }

    /// Convenience constructor from lists of 1-based player labels.
    pub fn from_player_lists(n: usize, lists: &[&[usize]]) -> Result<Self> {
        let coalitions = lists
            .iter()
            .map(|l| Coalition::from_players(l, n))
            .collect::<Result<Vec<_>>>()?;
        Self::from_coalitions(n, coalitions)
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u128 {
        self.members
    }

    pub fn grand(&self) -> Coalition {
        Coalition::grand(self.n)
    }

    pub fn contains(&self, c: Coalition) -> bool {
        (c.mask() as usize) < (1 << self.n) && self.members >> c.mask() & 1 == 1
    }

    pub fn has_grand_coalition(&self) -> bool {
        self.contains(self.grand())
    }

    pub fn is_power_set(&self) -> bool {
        self.members == full_membership(self.n)
    }

    pub fn len(&self) -> usize {
        self.members.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Adds `c` (ignored if already present).
    pub fn with(mut self, c: Coalition) -> Self {
        assert!(c.is_subset_of(self.grand()));
        self.members |= 1 << c.mask();
        self
    }

    /// Removes `c`; the empty coalition cannot be removed.
    pub fn without(mut self, c: Coalition) -> Self {
        if !c.is_empty() {
            self.members &= !(1 << c.mask());
        }
        self
    }

    /// Members in ascending mask order.
    pub fn members(&self) -> impl Iterator<Item = Coalition> + '_ {
        all_coalitions(self.n).filter(move |&c| self.contains(c))
    }

    /// Members ordered by cardinality, ties by mask.
    pub fn members_by_cardinality(&self) -> Vec<Coalition> {
        let mut out: Vec<_> = self.members().collect();
        out.sort_by_key(|c| (c.len(), c.mask()));
        out
    }

    /// Intersection of every member containing `t`; the grand coalition when
    /// no member contains `t`.
    pub fn closure(&self, t: Coalition) -> Coalition {
        self.members()
            .filter(|&s| t.is_subset_of(s))
            .fold(self.grand(), Coalition::intersection)
    }

    /// Closure of every coalition, indexed by mask, in `O(n 2^n)`.
    pub fn closure_table(&self) -> Vec<Coalition> {
        let size = 1usize << self.n;
        let grand = self.grand().mask();
        let mut table: Vec<u32> = (0..size as u32)
            .map(|m| if self.members >> m & 1 == 1 { m } else { grand })
            .collect();
        for bit in 0..self.n {
            let b = 1usize << bit;
            for m in 0..size {
                if m & b == 0 {
                    table[m] &= table[m | b];
                }
            }
        }
        table.into_iter().map(Coalition).collect()
    }

    pub fn closure_partition(&self) -> ClosurePartition {
        ClosurePartition::new(self)
    }

    pub fn is_intersection_closed(&self) -> bool {
        let members: Vec<u32> = self.members().map(Coalition::mask).collect();
        members.iter().enumerate().all(|(k, &s)| {
            members[k + 1..]
                .iter()
                .all(|&t| self.members >> (s & t) & 1 == 1)
        })
    }

    /// Smallest intersection-closed system containing `self`.
    pub fn intersection_closure(&self) -> SetSystem {
        let mut current = *self;
        loop {
            let members: Vec<u32> = current.members().map(Coalition::mask).collect();
            let mut next = current.members;
            for (k, &s) in members.iter().enumerate() {
                for &t in &members[k + 1..] {
                    next |= 1 << (s & t);
                }
            }
            if next == current.members {
                return current;
            }
            current.members = next;
        }
    }

    /// The system on `n - 1` players made of the members avoiding `index`,
    /// with the remaining players re-indexed densely.
    pub fn without_player(&self, index: usize) -> Result<SetSystem> {
        if index >= self.n {
            return Err(GameError::input(format!("player index {index} out of range")));
        }
        if self.n == 1 {
            return Err(GameError::input("cannot remove the only player"));
        }
        let kept = self
            .members()
            .filter(|c| !c.contains(index))
            .map(|c| c.remove_index(index));
        SetSystem::from_coalitions(self.n - 1, kept)
    }

    /// Applies a player relabelling: index `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> SetSystem {
        let moved = self.members().map(|c| permute_coalition(c, perm));
        SetSystem::from_coalitions(self.n, moved).expect("permutation keeps range")
    }
}

pub fn permute_coalition(c: Coalition, perm: &[usize]) -> Coalition {
    c.indices()
        .fold(Coalition::EMPTY, |acc, i| acc.with(perm[i]))
}

impl fmt::Debug for SetSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetSystem(n={}, {}: ", self.n, self.members)?;
        f.debug_set().entries(self.members()).finish()?;
        f.write_str(")")
    }
}

/// One closure class: all coalitions sharing a closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureClass {
    pub representative: Coalition,
    pub members: Vec<Coalition>,
}

impl ClosureClass {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// The partition of all coalitions by their closure in a set system.
#[derive(Clone, Debug)]
pub struct ClosurePartition {
    n: usize,
    rep: Vec<Coalition>,
    class_of: Vec<usize>,
    classes: Vec<ClosureClass>,
}

impl ClosurePartition {
    fn new(system: &SetSystem) -> Self {
        let rep = system.closure_table();
        let mut reps: Vec<Coalition> = rep.clone();
        reps.sort_by_key(|c| (c.len(), c.mask()));
        reps.dedup();
        let mut slot = vec![usize::MAX; rep.len()];
        for (k, r) in reps.iter().enumerate() {
            slot[r.index()] = k;
        }
        let mut classes: Vec<ClosureClass> = reps
            .iter()
            .map(|&r| ClosureClass {
                representative: r,
                members: Vec::new(),
            })
            .collect();
        let class_of: Vec<usize> = rep.iter().map(|r| slot[r.index()]).collect();
        for (m, &k) in class_of.iter().enumerate() {
            classes[k].members.push(Coalition(m as u32));
        }
        ClosurePartition {
            n: system.players(),
            rep,
            class_of,
            classes,
        }
    }

    pub fn players(&self) -> usize {
        self.n
    }

    /// Closure of `t`.
    pub fn rep(&self, t: Coalition) -> Coalition {
        self.rep[t.index()]
    }

    /// Index into [`Self::classes`] of the class containing `t`.
    pub fn class_index(&self, t: Coalition) -> usize {
        self.class_of[t.index()]
    }

    /// Classes ordered by representative cardinality, ties by mask.
    pub fn classes(&self) -> &[ClosureClass] {
        &self.classes
    }

    pub fn class_of(&self, t: Coalition) -> &ClosureClass {
        &self.classes[self.class_index(t)]
    }

    /// `|C(t)|`, the size of `t`'s class.
    pub fn class_size(&self, t: Coalition) -> usize {
        self.class_of(t).size()
    }

    pub fn representatives(&self) -> impl Iterator<Item = Coalition> + '_ {
        self.classes.iter().map(|c| c.representative)
    }
}

/// Lazily enumerates set systems in ascending membership-mask order.
#[derive(Clone, Debug)]
pub struct SystemEnumeration {
    n: usize,
    fixed: u128,
    free: Vec<u32>,
    counter: u64,
    end: u64,
}

impl Iterator for SystemEnumeration {
    type Item = SetSystem;

    fn next(&mut self) -> Option<SetSystem> {
        if self.counter >= self.end {
            return None;
        }
        let mut members = self.fixed;
        for (k, &m) in self.free.iter().enumerate() {
            if self.counter >> k & 1 == 1 {
                members |= 1 << m;
            }
        }
        self.counter += 1;
        Some(SetSystem { n: self.n, members })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.counter) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for SystemEnumeration {}

/// Every set system containing `∅` (and `N` when `require_grand`).
pub fn enumerate_systems(n: usize, require_grand: bool) -> Result<SystemEnumeration> {
    check_players(n)?;
    if n > EXHAUSTIVE_LIMIT {
        return Err(GameError::TooManyPlayers {
            players: n,
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let grand = Coalition::grand(n).mask();
    let free: Vec<u32> = (1..=grand)
        .filter(|&m| !(require_grand && m == grand))
        .collect();
    let fixed = if require_grand { 1 | 1 << grand } else { 1 };
    Ok(SystemEnumeration {
        n,
        fixed,
        end: 1u64 << free.len(),
        free,
        counter: 0,
    })
}

/// Distribution used by [`sample_system`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    /// Uniform over all systems containing `∅` and `N`.
    Uniform,
    /// A uniform draw closed under pairwise intersection. Always
    /// intersection-closed, but not uniform over such systems: systems
    /// reachable from many uniform draws are over-represented.
    IcBiased,
}

pub fn sample_system(n: usize, mode: SamplingMode, seed: u64) -> Result<SetSystem> {
    sample_system_with(n, mode, &mut rng::seeded(seed))
}

pub fn sample_system_with(n: usize, mode: SamplingMode, rng: &mut Rng) -> Result<SetSystem> {
    check_players(n)?;
    let full = full_membership(n);
    let grand_bit = 1u128 << Coalition::grand(n).mask();
    let draw: u128 = rng.random();
    let system = SetSystem {
        n,
        members: (draw & full) | 1 | grand_bit,
    };
    Ok(match mode {
        SamplingMode::Uniform => system,
        SamplingMode::IcBiased => system.intersection_closure(),
    })
}
