//! Surpluses, positive extensions and the R-, IC- and UD-values.
//!
//! All three values are Shapley values of a complete game built from the
//! incomplete one:
//!
//! * R-game: the surplus `Δ_v(S)` on each known coalition, zero elsewhere;
//! * IC-game: `v_IC(S) = v(c_K(S))`;
//! * UD-game: dividends equal on every closure class and consistent with the
//!   known worths.
//!
//! On intersection-closed systems containing `N` the UD dividends are found
//! by a triangular sweep over the known coalitions. Any other system goes
//! through [`UdSystem`], the class-level linear system, whose null space
//! decides whether the UD-value is unique.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{GameError, Result};
use crate::games::{Allocation, CompleteGame, Dividends, IncompleteGame};
use crate::linalg::{self, AffineSolution};
use crate::rng::{self, Rng};
use crate::scalar::Scalar;
use crate::setsys::{ClosurePartition, Coalition, SetSystem};

/// Which completion rule to apply.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKind {
    R,
    Ic,
    Ud,
}

impl ValueKind {
    pub const ALL: [ValueKind; 3] = [ValueKind::R, ValueKind::Ic, ValueKind::Ud];
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::R => "R",
            ValueKind::Ic => "IC",
            ValueKind::Ud => "UD",
        })
    }
}

impl FromStr for ValueKind {
    type Err = GameError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "r" => Ok(ValueKind::R),
            "ic" => Ok(ValueKind::Ic),
            "ud" => Ok(ValueKind::Ud),
            other => Err(GameError::input(format!("unknown value kind `{other}`"))),
        }
    }
}

/// `Δ_v(S) = v(S) - Σ_{T ∈ K, T ⊊ S} Δ_v(T)` for every known `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaSurpluses<S> {
    system: SetSystem,
    delta: Vec<S>,
}

impl<S: Scalar> DeltaSurpluses<S> {
    pub fn get(&self, c: Coalition) -> Option<&S> {
        self.system.contains(c).then(|| &self.delta[c.index()])
    }

    pub fn entries(&self) -> impl Iterator<Item = (Coalition, &S)> + '_ {
        self.system.members().map(|c| (c, &self.delta[c.index()]))
    }

    pub fn all_nonnegative(&self) -> bool {
        self.entries().all(|(_, d)| d.is_nonnegative())
    }

    /// Dividends equal to `Δ` on known coalitions and zero elsewhere.
    pub fn to_dividends(&self) -> Dividends<S> {
        Dividends::from_fn(self.system.players(), |c| {
            self.get(c).cloned().unwrap_or_else(S::zero)
        })
    }
}

pub fn delta_surpluses<S: Scalar>(game: &IncompleteGame<S>) -> DeltaSurpluses<S> {
    let system = *game.system();
    let mut delta = vec![S::zero(); 1 << system.players()];
    for s in system.members_by_cardinality().into_iter().skip(1) {
        let below = s
            .proper_subsets()
            .filter(|&t| system.contains(t))
            .fold(S::zero(), |acc, t| acc + delta[t.index()].clone());
        delta[s.index()] = game.known(s).clone() - below;
    }
    DeltaSurpluses { system, delta }
}

fn require_intersection_closed(system: &SetSystem) -> Result<()> {
    if system.is_intersection_closed() {
        Ok(())
    } else {
        Err(GameError::NotIntersectionClosed)
    }
}

fn require_grand(system: &SetSystem) -> Result<()> {
    if system.has_grand_coalition() {
        Ok(())
    } else {
        Err(GameError::GrandCoalitionMissing)
    }
}

/// Whether the game has a positive extension (only decided for
/// intersection-closed systems).
pub fn is_p_extendable<S: Scalar>(game: &IncompleteGame<S>) -> Result<bool> {
    require_intersection_closed(game.system())?;
    Ok(delta_surpluses(game).all_nonnegative())
}

fn lcm_up_to(n: usize) -> i64 {
    (1..=n as i64).fold(1, num_integer::lcm)
}

/// Class-level form of the UD conditions.
///
/// Rows are the nonempty known coalitions, columns the nonempty closure
/// representatives (both by cardinality). `A[S, C] = |C(C)|` when `C ⊆ S`.
/// The Shapley map `M[i, C] = Σ_{X ∈ C(C), i ∈ X} 1/|X|` is stored scaled by
/// `lcm(1..=n)` so that both matrices are integral.
#[derive(Clone, Debug)]
pub struct UdSystem {
    system: SetSystem,
    partition: ClosurePartition,
    rows: Vec<Coalition>,
    columns: Vec<Coalition>,
    coefficients: Vec<Vec<i64>>,
    shapley_scaled: Vec<Vec<i64>>,
    scale: i64,
}

/// Ranks behind a uniqueness decision.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct UniquenessRanks {
    pub rank_coefficients: usize,
    pub rank_stacked: usize,
    pub columns: usize,
}

impl UniquenessRanks {
    pub fn unique(&self) -> bool {
        self.rank_coefficients == self.rank_stacked
    }
}

impl UdSystem {
    pub fn build(system: &SetSystem) -> Self {
        let n = system.players();
        let partition = system.closure_partition();
        let rows: Vec<Coalition> = system.members_by_cardinality().into_iter().skip(1).collect();
        let columns: Vec<Coalition> = partition.representatives().filter(|c| !c.is_empty()).collect();
        let coefficients = rows
            .iter()
            .map(|&s| {
                columns
                    .iter()
                    .map(|&c| {
                        if c.is_subset_of(s) {
                            partition.class_size(c) as i64
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let scale = lcm_up_to(n);
        let shapley_scaled = (0..n)
            .map(|i| {
                columns
                    .iter()
                    .map(|&c| {
                        partition
                            .class_of(c)
                            .members
                            .iter()
                            .filter(|x| x.contains(i))
                            .map(|x| scale / x.len() as i64)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        UdSystem {
            system: *system,
            partition,
            rows,
            columns,
            coefficients,
            shapley_scaled,
            scale,
        }
    }

    pub fn system(&self) -> &SetSystem {
        &self.system
    }

    pub fn partition(&self) -> &ClosurePartition {
        &self.partition
    }

    pub fn rows(&self) -> &[Coalition] {
        &self.rows
    }

    pub fn columns(&self) -> &[Coalition] {
        &self.columns
    }

    pub fn integer_coefficients(&self) -> &[Vec<i64>] {
        &self.coefficients
    }

    /// Shapley map scaled by [`Self::scale`].
    pub fn integer_shapley_map(&self) -> &[Vec<i64>] {
        &self.shapley_scaled
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn coefficients<S: Scalar>(&self) -> Vec<Vec<S>> {
        self.coefficients
            .iter()
            .map(|r| r.iter().map(|&x| S::from_i64(x)).collect())
            .collect()
    }

    pub fn shapley_map<S: Scalar>(&self) -> Vec<Vec<S>> {
        self.shapley_scaled
            .iter()
            .map(|r| r.iter().map(|&x| S::from_ratio(x, self.scale)).collect())
            .collect()
    }

    pub fn rhs<S: Scalar>(&self, game: &IncompleteGame<S>) -> Vec<S> {
        assert_eq!(game.system(), &self.system);
        self.rows.iter().map(|&s| game.known(s).clone()).collect()
    }

    /// `rank(A)` and `rank([A; M])`, computed exactly.
    pub fn ranks(&self) -> UniquenessRanks {
        let mut stacked = self.coefficients.clone();
        stacked.extend(self.shapley_scaled.iter().cloned());
        UniquenessRanks {
            rank_coefficients: linalg::integer_rank(&self.coefficients),
            rank_stacked: linalg::integer_rank(&stacked),
            columns: self.columns.len(),
        }
    }

    /// True iff every solution of the class-level system has the same
    /// Shapley image. Requires `N ∈ K` to be meaningful.
    pub fn is_unique(&self) -> bool {
        self.ranks().unique()
    }

    /// The affine set of class dividends satisfying the known worths.
    pub fn solve<S: Scalar>(&self, game: &IncompleteGame<S>) -> AffineSolution<S> {
        linalg::solve_affine(&self.coefficients(), &self.rhs(game), self.columns.len())
            .expect("coefficient matrix has full row rank")
    }

    /// Spreads class dividends over every member of each class.
    pub fn broadcast<S: Scalar>(&self, class_dividends: &[S]) -> Dividends<S> {
        assert_eq!(class_dividends.len(), self.columns.len());
        Dividends::from_fn(self.system.players(), |x| {
            let rep = self.partition.rep(x);
            let col = self
                .columns
                .binary_search_by_key(&(rep.len(), rep.mask()), |c| (c.len(), c.mask()))
                .expect("representative is a column");
            class_dividends[col].clone()
        })
    }

    /// `M x`: the payoff vector produced by class dividends `x`.
    pub fn shapley_image<S: Scalar>(&self, class_dividends: &[S]) -> Vec<S> {
        linalg::mat_vec(&self.shapley_map(), class_dividends)
    }
}

pub fn build_ud_system(system: &SetSystem) -> UdSystem {
    UdSystem::build(system)
}

/// Whether every UD solution yields the same payoff vector on `system`.
pub fn is_ud_unique(system: &SetSystem) -> bool {
    if !system.has_grand_coalition() {
        return false;
    }
    if system.is_intersection_closed() {
        return true;
    }
    UdSystem::build(system).is_unique()
}

/// UD dividends on an intersection-closed system containing `N`.
///
/// Visits known coalitions by cardinality and solves
/// `|C(S)| δ(S) = v(S) - Σ_{T ∈ K, T ⊊ S} |C(T)| δ(T)`, then copies `δ(S)` to
/// every coalition of the class of `S`.
pub fn ud_dividends<S: Scalar>(game: &IncompleteGame<S>) -> Result<Dividends<S>> {
    let system = game.system();
    require_grand(system)?;
    require_intersection_closed(system)?;
    let partition = system.closure_partition();
    let mut delta = vec![S::zero(); 1 << system.players()];
    for s in system.members_by_cardinality().into_iter().skip(1) {
        let below = s
            .proper_subsets()
            .filter(|&t| system.contains(t))
            .fold(S::zero(), |acc, t| {
                acc + S::from_i64(partition.class_size(t) as i64) * delta[t.index()].clone()
            });
        delta[s.index()] =
            (game.known(s).clone() - below) / S::from_i64(partition.class_size(s) as i64);
    }
    Ok(Dividends::from_fn(system.players(), |x| {
        delta[partition.rep(x).index()].clone()
    }))
}

/// The UD solution set of any system containing `N`, for inspection.
pub fn ud_solution_set<S: Scalar>(game: &IncompleteGame<S>) -> Result<(UdSystem, AffineSolution<S>)> {
    require_grand(game.system())?;
    let ud = UdSystem::build(game.system());
    let solution = ud.solve(game);
    Ok((ud, solution))
}

/// The completion whose Shapley value defines `kind`.
///
/// The R-game is defined on any system containing `N`; the IC- and UD-games
/// additionally need an intersection-closed system.
pub fn special_game<S: Scalar>(game: &IncompleteGame<S>, kind: ValueKind) -> Result<CompleteGame<S>> {
    let system = game.system();
    require_grand(system)?;
    match kind {
        ValueKind::R => Ok(delta_surpluses(game).to_dividends().to_game()),
        ValueKind::Ic => {
            require_intersection_closed(system)?;
            let table = system.closure_table();
            Ok(CompleteGame::from_fn(system.players(), |s| {
                game.known(table[s.index()]).clone()
            }))
        }
        ValueKind::Ud => Ok(ud_dividends(game)?.to_game()),
    }
}

/// The R-, IC- or UD-value of `game`.
///
/// The UD-value is also returned on systems that are not
/// intersection-closed, provided it is unique there.
pub fn value<S: Scalar>(game: &IncompleteGame<S>, kind: ValueKind) -> Result<Allocation<S>> {
    let system = game.system();
    if kind == ValueKind::Ud && system.has_grand_coalition() && !system.is_intersection_closed() {
        let ud = UdSystem::build(system);
        if !ud.is_unique() {
            return Err(GameError::UdNotUnique);
        }
        let solution = ud.solve(game);
        return Ok(ud.broadcast(&solution.particular).shapley());
    }
    Ok(special_game(game, kind)?.shapley())
}

/// The equal division rule: `v(N) / n` to every player.
pub fn equal_division<S: Scalar>(game: &IncompleteGame<S>) -> Result<Allocation<S>> {
    let total = game.grand_value().ok_or(GameError::GrandCoalitionMissing)?;
    let share = total.clone() / S::from_i64(game.players() as i64);
    Ok(Allocation::new(vec![share; game.players()]))
}

/// A P-extendable game on `system` with worths in `[0, 1]`.
///
/// Draws `Δ(S) ~ U[0, 1]` for every nonempty member, accumulates worths
/// `v(S) = Σ_{T ∈ K, T ⊆ S} Δ(T)` and divides by `v(N)`.
pub fn random_p_extendable_game<S: Scalar>(system: &SetSystem, rng: &mut Rng) -> IncompleteGame<S> {
    let delta: Vec<S> = (0..1usize << system.players())
        .map(|m| {
            let c = Coalition::from_mask(m as u32);
            if !c.is_empty() && system.contains(c) {
                S::from_f64(rng.random::<f64>())
            } else {
                S::zero()
            }
        })
        .collect();
    let worth = |s: Coalition| {
        s.subsets()
            .filter(|&t| system.contains(t))
            .fold(S::zero(), |acc, t| acc + delta[t.index()].clone())
    };
    let norm = if system.has_grand_coalition() {
        worth(system.grand())
    } else {
        S::one()
    };
    let norm = if norm.is_zero() { S::one() } else { norm };
    IncompleteGame::from_fn(*system, |s| worth(s) / norm.clone())
}

struct ExtensionSampler {
    partition: ClosurePartition,
    // Per class: Δ of the representative, clamped at zero.
    class_mass: Vec<f64>,
}

impl ExtensionSampler {
    fn new(game: &IncompleteGame<f64>) -> Result<Self> {
        let system = game.system();
        require_grand(system)?;
        require_intersection_closed(system)?;
        let delta = delta_surpluses(game);
        if !delta.all_nonnegative() {
            return Err(GameError::NotPExtendable);
        }
        let partition = system.closure_partition();
        let class_mass = partition
            .classes()
            .iter()
            .map(|class| delta.get(class.representative).copied().unwrap_or(0.0).max(0.0))
            .collect();
        Ok(ExtensionSampler {
            partition,
            class_mass,
        })
    }

    fn sample(&self, rng: &mut Rng) -> Dividends<f64> {
        let n = self.partition.players();
        let mut d = vec![0.0; 1 << n];
        for (class, &mass) in self.partition.classes().iter().zip(&self.class_mass) {
            if class.representative.is_empty() || mass == 0.0 {
                continue;
            }
            if class.size() == 1 {
                d[class.members[0].index()] = mass;
                continue;
            }
            let draws: Vec<f64> = class.members.iter().map(|_| rng.sample(Exp1)).collect();
            let total: f64 = draws.iter().sum();
            for (x, e) in class.members.iter().zip(draws) {
                d[x.index()] = mass * e / total;
            }
        }
        Dividends::new(n, d).expect("well-formed table")
    }
}

/// A positive extension drawn uniformly: each class's dividends are a
/// uniform point of the simplex `{x >= 0, Σ x = Δ_v(S)}`.
pub fn sample_p_extension(game: &IncompleteGame<f64>, seed: u64) -> Result<CompleteGame<f64>> {
    sample_p_extension_with(game, &mut rng::seeded(seed))
}

pub fn sample_p_extension_with(game: &IncompleteGame<f64>, rng: &mut Rng) -> Result<CompleteGame<f64>> {
    Ok(ExtensionSampler::new(game)?.sample(rng).to_game())
}

const MC_BLOCK: usize = 1024;

/// Mean Shapley value over `samples` uniformly drawn positive extensions.
///
/// Draw `k` uses a generator derived from `(seed, k)`, and sums are formed
/// per fixed block of draws and then pairwise, so the result does not depend
/// on the number of worker threads.
pub fn expected_shapley_mc(game: &IncompleteGame<f64>, samples: usize, seed: u64) -> Result<Allocation<f64>> {
    if samples == 0 {
        return Err(GameError::input("at least one sample is required"));
    }
    let sampler = ExtensionSampler::new(game)?;
    let n = game.players();
    let blocks = samples.div_ceil(MC_BLOCK);
    let block_sums: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = vec![0.0; n];
            for k in b * MC_BLOCK..((b + 1) * MC_BLOCK).min(samples) {
                let mut rng = rng::derived(seed, &[k as u64]);
                let phi = sampler.sample(&mut rng).shapley();
                for (a, p) in acc.iter_mut().zip(phi.payoffs()) {
                    *a += p;
                }
            }
            acc
        })
        .collect();
    let total = pairwise_sum(&block_sums, n);
    Ok(Allocation::new(total.into_iter().map(|x| x / samples as f64).collect()))
}

fn pairwise_sum(parts: &[Vec<f64>], n: usize) -> Vec<f64> {
    match parts.len() {
        0 => vec![0.0; n],
        1 => parts[0].clone(),
        len => {
            let (left, right) = parts.split_at(len / 2);
            let (l, r) = (pairwise_sum(left, n), pairwise_sum(right, n));
            l.iter().zip(r).map(|(a, b)| a + b).collect()
        }
    }
}
