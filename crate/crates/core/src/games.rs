//! Complete and incomplete games, dividends and the Shapley value.

use std::fmt;
use std::ops::Index;

use rand::Rng as _;

use crate::error::{GameError, Result};
use crate::rng::{self, Rng};
use crate::scalar::{self, Scalar};
use crate::setsys::{all_coalitions, permute_coalition, ClosurePartition, Coalition, SetSystem};

fn table_size(n: usize) -> usize {
    1usize << n
}

/// In-place Möbius transform: worths to dividends, `O(n 2^n)`.
pub fn moebius_in_place<S: Scalar>(table: &mut [S]) {
    assert!(table.len().is_power_of_two());
    let mut bit = 1;
    while bit < table.len() {
        for m in 0..table.len() {
            if m & bit != 0 {
                let lower = table[m ^ bit].clone();
                table[m] = table[m].clone() - lower;
            }
        }
        bit <<= 1;
    }
}

/// In-place zeta transform (subset sums): dividends to worths.
pub fn zeta_in_place<S: Scalar>(table: &mut [S]) {
    assert!(table.len().is_power_of_two());
    let mut bit = 1;
    while bit < table.len() {
        for m in 0..table.len() {
            if m & bit != 0 {
                let lower = table[m ^ bit].clone();
                table[m] = table[m].clone() + lower;
            }
        }
        bit <<= 1;
    }
}

/// A game with a worth for every coalition; `v(∅) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompleteGame<S> {
    n: usize,
    values: Vec<S>,
}

/// A table of per-coalition dividends; `d(∅) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dividends<S> {
    n: usize,
    d: Vec<S>,
}

/// Positivity and monotonicity of a complete game.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct GameClass {
    pub positive: bool,
    pub monotone: bool,
}

fn check_table<S: Scalar>(n: usize, table: &[S]) -> Result<()> {
    if table.len() != table_size(n) {
        return Err(GameError::input(format!(
            "table has {} entries, expected 2^{n}",
            table.len()
        )));
    }
    if !table[0].is_zero() {
        return Err(GameError::input("entry of the empty coalition must be 0"));
    }
    Ok(())
}

impl<S: Scalar> CompleteGame<S> {
    pub fn new(n: usize, values: Vec<S>) -> Result<Self> {
        check_table(n, &values)?;
        Ok(CompleteGame { n, values })
    }

    /// Builds a game from a worth function; the empty coalition gets 0.
    pub fn from_fn(n: usize, mut worth: impl FnMut(Coalition) -> S) -> Self {
        let values = all_coalitions(n)
            .map(|c| if c.is_empty() { S::zero() } else { worth(c) })
            .collect();
        CompleteGame { n, values }
    }

    pub fn zero(n: usize) -> Self {
        CompleteGame {
            n,
            values: vec![S::zero(); table_size(n)],
        }
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, c: Coalition) -> &S {
        &self.values[c.index()]
    }

    pub fn grand_value(&self) -> &S {
        self.values.last().expect("non-empty table")
    }

    pub fn dividends(&self) -> Dividends<S> {
        let mut d = self.values.clone();
        moebius_in_place(&mut d);
        Dividends { n: self.n, d }
    }

    pub fn shapley(&self) -> Allocation<S> {
        self.dividends().shapley()
    }

    /// Positivity (all dividends `>= -tol`) and monotonicity
    /// (`v(S) <= v(S ∪ i) + tol`, which implies it for every `S ⊆ T`).
    pub fn classify_with(&self, tol: &S) -> GameClass {
        let positive = self
            .dividends()
            .d
            .iter()
            .all(|x| x.clone() >= -tol.clone());
        let monotone = all_coalitions(self.n).all(|s| {
            (0..self.n).filter(|&i| !s.contains(i)).all(|i| {
                self.values[s.index()].clone() <= self.values[s.with(i).index()].clone() + tol.clone()
            })
        });
        GameClass { positive, monotone }
    }

    pub fn classify(&self) -> GameClass {
        self.classify_with(&S::tolerance())
    }

    /// True iff the dividends are constant on every closure class.
    pub fn is_in_ud_class(&self, partition: &ClosurePartition) -> bool {
        assert_eq!(partition.players(), self.n);
        let d = self.dividends();
        partition.classes().iter().all(|class| {
            let first = &d.d[class.members[0].index()];
            class.members.iter().all(|m| d.d[m.index()].approx_eq(first))
        })
    }

    /// The incomplete game revealing only the members of `system`.
    pub fn restrict(&self, system: &SetSystem) -> IncompleteGame<S> {
        assert_eq!(system.players(), self.n);
        IncompleteGame::from_dense(*system, self.values.clone()).expect("valid table")
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.clone() + b.clone())
            .collect();
        CompleteGame { n: self.n, values }
    }

    pub fn scale(&self, factor: &S) -> Self {
        let values = self.values.iter().map(|a| a.clone() * factor.clone()).collect();
        CompleteGame { n: self.n, values }
    }

    /// Relabels players: index `i` becomes `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut values = vec![S::zero(); self.values.len()];
        for c in all_coalitions(self.n) {
            values[permute_coalition(c, perm).index()] = self.values[c.index()].clone();
        }
        CompleteGame { n: self.n, values }
    }

    /// Players `i` with `v(S ∪ i) = v(S)` for all `S`.
    pub fn null_players(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&i| {
                all_coalitions(self.n)
                    .filter(|s| !s.contains(i))
                    .all(|s| self.values[s.with(i).index()].approx_eq(&self.values[s.index()]))
            })
            .collect()
    }

    /// Pairs `(i, j)`, `i < j`, with `v(S ∪ i) = v(S ∪ j)` for all `S` avoiding both.
    pub fn equal_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let equal = all_coalitions(self.n)
                    .filter(|s| !s.contains(i) && !s.contains(j))
                    .all(|s| self.values[s.with(i).index()].approx_eq(&self.values[s.with(j).index()]));
                if equal {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

impl<S: Scalar> Dividends<S> {
    pub fn new(n: usize, d: Vec<S>) -> Result<Self> {
        check_table(n, &d)?;
        Ok(Dividends { n, d })
    }

    pub fn from_fn(n: usize, mut dividend: impl FnMut(Coalition) -> S) -> Self {
        let d = all_coalitions(n)
            .map(|c| if c.is_empty() { S::zero() } else { dividend(c) })
            .collect();
        Dividends { n, d }
    }

    pub fn players(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[S] {
        &self.d
    }

    pub fn get(&self, c: Coalition) -> &S {
        &self.d[c.index()]
    }

    pub fn to_game(&self) -> CompleteGame<S> {
        let mut values = self.d.clone();
        zeta_in_place(&mut values);
        CompleteGame { n: self.n, values }
    }

    /// `φ_i = Σ_{S ∋ i} d(S) / |S|`.
    pub fn shapley(&self) -> Allocation<S> {
        let shares: Vec<S> = (0..=self.n)
            .map(|k| if k == 0 { S::zero() } else { S::from_ratio(1, k as i64) })
            .collect();
        let mut payoffs = vec![S::zero(); self.n];
        for c in all_coalitions(self.n).skip(1) {
            let share = self.d[c.index()].clone() * shares[c.len()].clone();
            for i in c.indices() {
                payoffs[i] = payoffs[i].clone() + share.clone();
            }
        }
        Allocation { payoffs }
    }
}

/// Which direction [`dividend_transform`] runs.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TransformDirection {
    ToDividends,
    ToValues,
}

/// Möbius (`ToDividends`) or zeta (`ToValues`) transform of a raw table.
pub fn dividend_transform<S: Scalar>(
    n: usize,
    table: &[S],
    direction: TransformDirection,
) -> Result<Vec<S>> {
    check_table(n, table)?;
    let mut out = table.to_vec();
    match direction {
        TransformDirection::ToDividends => moebius_in_place(&mut out),
        TransformDirection::ToValues => zeta_in_place(&mut out),
    }
    Ok(out)
}

/// One payoff per player, indexed by 0-based player index.
#[derive(Clone, Debug, PartialEq)]
pub struct Allocation<S> {
    payoffs: Vec<S>,
}

impl<S: Scalar> Allocation<S> {
    pub fn new(payoffs: Vec<S>) -> Self {
        Allocation { payoffs }
    }

    pub fn payoffs(&self) -> &[S] {
        &self.payoffs
    }

    pub fn into_vec(self) -> Vec<S> {
        self.payoffs
    }

    pub fn len(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.payoffs.is_empty()
    }

    pub fn total(&self) -> S {
        scalar::sum(self.payoffs.iter().cloned())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.payoffs.iter().map(Scalar::to_f64).collect()
    }

    pub fn l1_distance(&self, other: &Self) -> S {
        scalar::sum(
            self.payoffs
                .iter()
                .zip(&other.payoffs)
                .map(|(a, b)| (a.clone() - b.clone()).abs_value()),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        scalar::max_abs_diff(&self.payoffs, &other.payoffs)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.payoffs.len() == other.payoffs.len()
            && self.payoffs.iter().zip(&other.payoffs).all(|(a, b)| a.approx_eq(b))
    }

    pub fn add(&self, other: &Self) -> Self {
        Allocation::new(
            self.payoffs
                .iter()
                .zip(&other.payoffs)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        )
    }

    pub fn scale(&self, factor: &S) -> Self {
        Allocation::new(self.payoffs.iter().map(|a| a.clone() * factor.clone()).collect())
    }

    /// Relabels: the payoff of index `i` moves to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut payoffs = vec![S::zero(); self.payoffs.len()];
        for (i, p) in self.payoffs.iter().enumerate() {
            payoffs[perm[i]] = p.clone();
        }
        Allocation { payoffs }
    }
}

impl<S> Index<usize> for Allocation<S> {
    type Output = S;

    fn index(&self, i: usize) -> &S {
        &self.payoffs[i]
    }
}

impl<S: Scalar> fmt::Display for Allocation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, p) in self.payoffs.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// A game whose worths are known only on a set system.
#[derive(Clone, Debug, PartialEq)]
pub struct IncompleteGame<S> {
    system: SetSystem,
    // Dense table; entries outside `system` are zero and never exposed.
    values: Vec<S>,
}

impl<S: Scalar> IncompleteGame<S> {
    /// Builds a game from `(coalition, worth)` pairs. The system is the listed
    /// coalitions plus `∅`.
    pub fn from_known(n: usize, known: impl IntoIterator<Item = (Coalition, S)>) -> Result<Self> {
        let mut system = SetSystem::empty(n)?;
        let mut values = vec![S::zero(); table_size(n)];
        for (c, x) in known {
            if !c.is_subset_of(Coalition::grand(n)) {
                return Err(GameError::input(format!(
                    "coalition mask {} out of range for {n} players",
                    c.mask()
                )));
            }
            if c.is_empty() {
                if !x.is_zero() {
                    return Err(GameError::input("worth of the empty coalition must be 0"));
                }
                continue;
            }
            if system.contains(c) {
                return Err(GameError::input(format!("coalition mask {} listed twice", c.mask())));
            }
            system = system.with(c);
            values[c.index()] = x;
        }
        Ok(IncompleteGame { system, values })
    }

    /// Same as [`Self::from_known`] with 1-based player lists.
    pub fn from_player_lists(n: usize, known: &[(&[usize], S)]) -> Result<Self> {
        let pairs = known
            .iter()
            .map(|(ps, x)| Ok((Coalition::from_players(ps, n)?, x.clone())))
            .collect::<Result<Vec<_>>>()?;
        Self::from_known(n, pairs)
    }

    /// Keeps the entries of `table` on `system`.
    pub fn from_dense(system: SetSystem, table: Vec<S>) -> Result<Self> {
        check_table(system.players(), &table)?;
        let values = table
            .into_iter()
            .enumerate()
            .map(|(m, x)| {
                if system.contains(Coalition::from_mask(m as u32)) {
                    x
                } else {
                    S::zero()
                }
            })
            .collect();
        Ok(IncompleteGame { system, values })
    }

    /// A game on `system` with worths from `worth` (`∅` gets 0).
    pub fn from_fn(system: SetSystem, mut worth: impl FnMut(Coalition) -> S) -> Self {
        let values = all_coalitions(system.players())
            .map(|c| {
                if !c.is_empty() && system.contains(c) {
                    worth(c)
                } else {
                    S::zero()
                }
            })
            .collect();
        IncompleteGame { system, values }
    }

    pub fn players(&self) -> usize {
        self.system.players()
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn value(&self, c: Coalition) -> Option<&S> {
        self.system.contains(c).then(|| &self.values[c.index()])
    }

    /// Worth of a known coalition; panics otherwise.
    pub fn known(&self, c: Coalition) -> &S {
        self.value(c)
            .unwrap_or_else(|| panic!("coalition {c} is not known"))
    }

    pub fn grand_value(&self) -> Option<&S> {
        self.value(self.system.grand())
    }

    /// Known coalitions with their worths, ascending mask order.
    pub fn entries(&self) -> impl Iterator<Item = (Coalition, &S)> + '_ {
        self.system.members().map(|c| (c, &self.values[c.index()]))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.system != other.system {
            return Err(GameError::input("games live on different set systems"));
        }
        Ok(IncompleteGame::from_fn(self.system, |c| {
            self.values[c.index()].clone() + other.values[c.index()].clone()
        }))
    }

    pub fn scale(&self, factor: &S) -> Self {
        IncompleteGame::from_fn(self.system, |c| self.values[c.index()].clone() * factor.clone())
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let system = self.system.permuted(perm);
        let mut values = vec![S::zero(); self.values.len()];
        for c in self.system.members() {
            values[permute_coalition(c, perm).index()] = self.values[c.index()].clone();
        }
        IncompleteGame { system, values }
    }

    /// Converts the worths into another scalar type.
    pub fn map_scalar<T: Scalar>(&self, mut f: impl FnMut(&S) -> T) -> IncompleteGame<T> {
        IncompleteGame {
            system: self.system,
            values: self.values.iter().map(&mut f).collect(),
        }
    }

    pub fn to_f64(&self) -> IncompleteGame<f64> {
        self.map_scalar(Scalar::to_f64)
    }

    /// Removes the player at `index`.
    ///
    /// The remaining players are re-indexed densely; the returned map lists,
    /// for each new index, the original index. The result may lack its grand
    /// coalition.
    pub fn remove_player(&self, index: usize) -> Result<(IncompleteGame<S>, Vec<usize>)> {
        let system = self.system.without_player(index)?;
        let mut values = vec![S::zero(); table_size(system.players())];
        for c in self.system.members().filter(|c| !c.contains(index)) {
            values[c.remove_index(index).index()] = self.values[c.index()].clone();
        }
        let mapping = (0..self.players()).filter(|&i| i != index).collect();
        Ok((IncompleteGame { system, values }, mapping))
    }
}

/// Independent `U[low, high]` worths on every nonempty member of `system`.
pub fn random_game<S: Scalar>(system: &SetSystem, seed: u64, low: f64, high: f64) -> Result<IncompleteGame<S>> {
    random_game_with(system, &mut rng::seeded(seed), low, high)
}

pub fn random_game_with<S: Scalar>(
    system: &SetSystem,
    rng: &mut Rng,
    low: f64,
    high: f64,
) -> Result<IncompleteGame<S>> {
    if !(low <= high) {
        return Err(GameError::input(format!("empty interval [{low}, {high}]")));
    }
    Ok(IncompleteGame::from_fn(*system, |_| {
        S::from_f64(low + (high - low) * rng.random::<f64>())
    }))
}

/// Family of [`basis_game`].
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum BasisKind {
    /// `u_S(T) = 1` iff `S ⊆ T`.
    Unanimity,
    /// Dividends `1 / 2^|S|` on every nonempty subset of `S`.
    HalfDividend,
}

pub fn basis_game<S: Scalar>(kind: BasisKind, support: Coalition, n: usize) -> Result<CompleteGame<S>> {
    if support.is_empty() {
        return Err(GameError::input("basis games need a nonempty coalition"));
    }
    if !support.is_subset_of(Coalition::grand(n)) {
        return Err(GameError::input("coalition out of range"));
    }
    Ok(match kind {
        BasisKind::Unanimity => {
            CompleteGame::from_fn(n, |t| if support.is_subset_of(t) { S::one() } else { S::zero() })
        }
        BasisKind::HalfDividend => {
            let weight = S::from_ratio(1, 1 << support.len());
            Dividends::from_fn(n, |t| {
                if t.is_subset_of(support) {
                    weight.clone()
                } else {
                    S::zero()
                }
            })
            .to_game()
        }
    })
}
