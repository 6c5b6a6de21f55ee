//! Instance-level checks of allocation axioms.
//!
//! Every check evaluates one concrete instance and returns an
//! [`AxiomReport`]. When a value is undefined on a derived instance (a
//! reduced system without its grand coalition, or a non-unique UD-value) the
//! report is [`Status::Inapplicable`] rather than an error.

use std::fmt;

use crate::error::{GameError, Result};
use crate::games::{Allocation, CompleteGame, IncompleteGame};
use crate::scalar::Scalar;
use crate::setsys::{all_coalitions, Coalition, SetSystem};
use crate::values::{self, ValueKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Efficiency,
    Additivity,
    Equality,
    PhiConsistency,
    NullPlayer,
    EqualTreatment,
    Invariance,
    Fairness,
    BalancedContributions,
    SymmetricPartnership,
}

impl Axiom {
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Efficiency => "efficiency",
            Axiom::Additivity => "additivity",
            Axiom::Equality => "equality",
            Axiom::PhiConsistency => "phi_consistency",
            Axiom::NullPlayer => "null_player",
            Axiom::EqualTreatment => "equal_treatment",
            Axiom::Invariance => "invariance",
            Axiom::Fairness => "fairness",
            Axiom::BalancedContributions => "balanced_contributions",
            Axiom::SymmetricPartnership => "symmetric_partnership",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Satisfied,
    Violated,
    Inapplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Satisfied => "satisfied",
            Status::Violated => "violated",
            Status::Inapplicable => "inapplicable",
        })
    }
}

/// The quantities an axiom equates, for the worst offending instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub description: String,
    pub coalitions: Vec<Coalition>,
    pub left: String,
    pub right: String,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub kind: ValueKind,
    pub status: Status,
    /// Largest discrepancy found; present whenever something was compared.
    pub witness: Option<Witness>,
    /// Why the check was inapplicable.
    pub reason: Option<String>,
}

impl AxiomReport {
    fn inapplicable(axiom: Axiom, kind: ValueKind, reason: impl Into<String>) -> Self {
        AxiomReport {
            axiom,
            kind,
            status: Status::Inapplicable,
            witness: None,
            reason: Some(reason.into()),
        }
    }

    fn judged(axiom: Axiom, kind: ValueKind, threshold: f64, witness: Option<Witness>) -> Self {
        let status = match &witness {
            Some(w) if w.gap > threshold => Status::Violated,
            _ => Status::Satisfied,
        };
        AxiomReport {
            axiom,
            kind,
            status,
            witness,
            reason: None,
        }
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }
}

/// Discrepancies up to this bound count as agreement: ten times the scalar
/// tolerance in float mode, zero in exact mode.
pub fn violation_threshold<S: Scalar>() -> f64 {
    10.0 * S::tolerance().to_f64()
}

/// Tracks the largest gap over a sequence of comparisons.
struct Worst(Option<Witness>);

impl Worst {
    fn new() -> Self {
        Worst(None)
    }

    fn compare<S: Scalar>(&mut self, left: &S, right: &S, description: impl FnOnce() -> String, coalitions: Vec<Coalition>) {
        let gap = (left.clone() - right.clone()).abs_value().to_f64();
        if self.0.as_ref().is_some_and(|w| w.gap >= gap) {
            return;
        }
        self.0 = Some(Witness {
            description: description(),
            coalitions,
            left: left.to_string(),
            right: right.to_string(),
            gap,
        });
    }
}

fn is_domain_error(e: &GameError) -> bool {
    matches!(
        e,
        GameError::NotIntersectionClosed | GameError::GrandCoalitionMissing | GameError::UdNotUnique
    )
}

/// `Ok(None)` when the value is undefined on `game`.
fn try_value<S: Scalar>(game: &IncompleteGame<S>, kind: ValueKind) -> Result<Option<Allocation<S>>> {
    match values::value(game, kind) {
        Ok(a) => Ok(Some(a)),
        Err(e) if is_domain_error(&e) => Ok(None),
        Err(e) => Err(e),
    }
}

fn outside_domain(kind: ValueKind, what: &str) -> String {
    format!("{kind}-value undefined on {what}")
}

fn player(i: usize) -> String {
    (i + 1).to_string()
}

fn same_shape<S: Scalar>(g: &IncompleteGame<S>, h: &IncompleteGame<S>) -> Result<()> {
    if g.system() != h.system() {
        return Err(GameError::Input("paired games must share players and known coalitions".into()));
    }
    Ok(())
}

/// Efficiency, additivity, equality or φ-consistency on one game (`h` is the
/// second game for additivity and equality).
pub fn check_basic<S: Scalar>(
    kind: ValueKind,
    axiom: Axiom,
    g: &IncompleteGame<S>,
    h: Option<&IncompleteGame<S>>,
) -> Result<AxiomReport> {
    let threshold = violation_threshold::<S>();
    let needs_pair = matches!(axiom, Axiom::Additivity | Axiom::Equality);
    let h = match (needs_pair, h) {
        (true, Some(h)) => {
            same_shape(g, h)?;
            Some(h)
        }
        (true, None) => return Err(GameError::Input(format!("{axiom} needs two games"))),
        (false, _) => None,
    };
    let Some(fg) = try_value(g, kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the game")));
    };
    let n = g.players();
    let mut worst = Worst::new();
    match axiom {
        Axiom::Efficiency => {
            let total = g.grand_value().expect("value exists only with N known");
            worst.compare(&fg.total(), total, || "sum of payoffs vs v(N)".into(), vec![Coalition::grand(n)]);
        }
        Axiom::Additivity => {
            let h = h.expect("checked");
            let Some(fh) = try_value(h, kind)? else {
                return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the second game")));
            };
            let Some(fsum) = try_value(&g.add(h)?, kind)? else {
                return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the sum")));
            };
            let combined = fg.add(&fh);
            for i in 0..n {
                worst.compare(&fsum[i], &combined[i], || format!("player {} f(v+w) vs f(v)+f(w)", player(i)), vec![]);
            }
        }
        Axiom::Equality => {
            let h = h.expect("checked");
            if let Some((c, _)) = g.entries().find(|(c, x)| !x.approx_eq(h.known(*c))) {
                return Ok(AxiomReport::inapplicable(
                    axiom,
                    kind,
                    format!("games differ on known coalition {}", c.mask()),
                ));
            }
            let Some(fh) = try_value(h, kind)? else {
                return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the second game")));
            };
            for i in 0..n {
                worst.compare(&fg[i], &fh[i], || format!("player {} f(v) vs f(w)", player(i)), vec![]);
            }
        }
        Axiom::PhiConsistency => {
            if !g.system().is_power_set() {
                return Ok(AxiomReport::inapplicable(axiom, kind, "known coalitions are not 2^N"));
            }
            let complete = CompleteGame::from_fn(n, |c| g.known(c).clone());
            let phi = complete.shapley();
            for i in 0..n {
                worst.compare(&fg[i], &phi[i], || format!("player {} f vs Shapley", player(i)), vec![]);
            }
        }
        other => return Err(GameError::Input(format!("{other} is not a basic axiom"))),
    }
    Ok(AxiomReport::judged(axiom, kind, threshold, worst.0))
}

/// IC-null player or IC-equal treatment for the UD-value of `(system, v|system)`.
///
/// Inapplicable unless `v` has constant dividends on every closure class.
pub fn check_ud_class_axiom<S: Scalar>(v: &CompleteGame<S>, system: &SetSystem, axiom: Axiom) -> Result<AxiomReport> {
    let kind = ValueKind::Ud;
    if !matches!(axiom, Axiom::NullPlayer | Axiom::EqualTreatment) {
        return Err(GameError::Input(format!("{axiom} is not a class axiom")));
    }
    if system.players() != v.players() {
        return Err(GameError::Input("game and set system disagree on players".into()));
    }
    if !v.is_in_ud_class(&system.closure_partition()) {
        return Ok(AxiomReport::inapplicable(axiom, kind, "game is outside the UD class of the system"));
    }
    let Some(payoffs) = try_value(&v.restrict(system), kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the restricted game")));
    };
    let mut worst = Worst::new();
    if axiom == Axiom::NullPlayer {
        for i in v.null_players() {
            worst.compare(&payoffs[i], &S::zero(), || format!("null player {}", player(i)), vec![]);
        }
    } else {
        for (i, j) in v.equal_pairs() {
            worst.compare(
                &payoffs[i],
                &payoffs[j],
                || format!("equal players {} and {}", player(i), player(j)),
                vec![],
            );
        }
    }
    Ok(AxiomReport::judged(axiom, kind, violation_threshold::<S>(), worst.0))
}

/// Invariance from irrelevant changes: if the special games of `g` and `h`
/// coincide, so must their values.
pub fn check_invariance<S: Scalar>(kind: ValueKind, g: &IncompleteGame<S>, h: &IncompleteGame<S>) -> Result<AxiomReport> {
    let axiom = Axiom::Invariance;
    if g.players() != h.players() {
        return Err(GameError::Input("games disagree on players".into()));
    }
    let special = |x: &IncompleteGame<S>| match values::special_game(x, kind) {
        Ok(s) => Ok(Some(s)),
        Err(e) if is_domain_error(&e) => Ok(None),
        Err(e) => Err(e),
    };
    let (Some(sg), Some(sh)) = (special(g)?, special(h)?) else {
        return Ok(AxiomReport::inapplicable(axiom, kind, format!("{kind}-game undefined")));
    };
    if sg.values().iter().zip(sh.values()).any(|(a, b)| !a.approx_eq(b)) {
        return Ok(AxiomReport::inapplicable(axiom, kind, format!("{kind}-games differ")));
    }
    let (Some(fg), Some(fh)) = (try_value(g, kind)?, try_value(h, kind)?) else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "one of the games")));
    };
    let mut worst = Worst::new();
    for i in 0..g.players() {
        worst.compare(&fg[i], &fh[i], || format!("player {} across systems", player(i)), vec![]);
    }
    Ok(AxiomReport::judged(axiom, kind, violation_threshold::<S>(), worst.0))
}

fn restrict_to<S: Scalar>(g: &IncompleteGame<S>, system: SetSystem) -> IncompleteGame<S> {
    IncompleteGame::from_fn(system, |c| g.known(c).clone())
}

/// Fairness at `s`: dropping `s` from the known coalitions shifts the payoff
/// of every member of `s` by the same amount.
pub fn check_fairness<S: Scalar>(kind: ValueKind, g: &IncompleteGame<S>, s: Coalition) -> Result<AxiomReport> {
    let axiom = Axiom::Fairness;
    if !g.system().contains(s) {
        return Err(GameError::Input(format!("coalition {} is not known", s.mask())));
    }
    if s.is_empty() || s == Coalition::grand(g.players()) {
        return Ok(AxiomReport::inapplicable(axiom, kind, "fairness concerns proper nonempty coalitions"));
    }
    let Some(before) = try_value(g, kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the game")));
    };
    let reduced = restrict_to(g, g.system().without(s));
    let Some(after) = try_value(&reduced, kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the reduced system")));
    };
    let shift: Vec<S> = (0..g.players())
        .map(|i| before[i].clone() - after[i].clone())
        .collect();
    let members: Vec<usize> = s.indices().collect();
    let mut worst = Worst::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            worst.compare(
                &shift[i],
                &shift[j],
                || format!("payoff shifts of players {} and {} when {} is dropped", player(i), player(j), s),
                vec![s],
            );
        }
    }
    Ok(AxiomReport::judged(axiom, kind, violation_threshold::<S>(), worst.0))
}

/// Payoff of original player `target` in the game without player `removed`.
fn value_without<S: Scalar>(
    g: &IncompleteGame<S>,
    kind: ValueKind,
    removed: usize,
    target: usize,
) -> Result<Option<S>> {
    let (sub, mapping) = g.remove_player(removed)?;
    let Some(payoffs) = try_value(&sub, kind)? else {
        return Ok(None);
    };
    let k = mapping.iter().position(|&o| o == target).expect("target survives");
    Ok(Some(payoffs[k].clone()))
}

/// Balanced contributions for players `i` and `j` (0-based).
pub fn check_balanced_contributions<S: Scalar>(
    kind: ValueKind,
    g: &IncompleteGame<S>,
    i: usize,
    j: usize,
) -> Result<AxiomReport> {
    let axiom = Axiom::BalancedContributions;
    let n = g.players();
    if i == j || i >= n || j >= n {
        return Err(GameError::Input("balanced contributions needs two distinct players".into()));
    }
    let Some(full) = try_value(g, kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the game")));
    };
    let Some(i_without_j) = value_without(g, kind, j, i)? else {
        return Ok(AxiomReport::inapplicable(
            axiom,
            kind,
            outside_domain(kind, &format!("the subgame without player {}", player(j))),
        ));
    };
    let Some(j_without_i) = value_without(g, kind, i, j)? else {
        return Ok(AxiomReport::inapplicable(
            axiom,
            kind,
            outside_domain(kind, &format!("the subgame without player {}", player(i))),
        ));
    };
    let left = full[i].clone() - i_without_j;
    let right = full[j].clone() - j_without_i;
    let mut worst = Worst::new();
    worst.compare(
        &left,
        &right,
        || format!("gain of player {} from {} vs gain of {} from {}", player(i), player(j), player(j), player(i)),
        vec![Coalition::singleton(i).with(j)],
    );
    Ok(AxiomReport::judged(axiom, kind, violation_threshold::<S>(), worst.0))
}

/// Whether `p` is a coalition of partners in `g`.
///
/// For every known `S` not containing all of `p`: if `S ∖ P` is known then
/// `v(S) = v(S ∖ P)`, otherwise every known proper subset of `S` is worth 0.
pub fn is_partner_coalition<S: Scalar>(g: &IncompleteGame<S>, p: Coalition) -> bool {
    let system = g.system();
    system.members().filter(|s| !p.is_subset_of(*s)).all(|s| {
        let rest = s.difference(p);
        if system.contains(rest) {
            g.known(s).approx_eq(g.known(rest))
        } else {
            s.proper_subsets()
                .filter(|t| system.contains(*t))
                .all(|t| g.known(t).approx_eq(&S::zero()))
        }
    })
}

/// All coalitions of partners with at least two players, ascending mask order.
pub fn find_partner_coalitions<S: Scalar>(g: &IncompleteGame<S>) -> Vec<Coalition> {
    all_coalitions(g.players())
        .filter(|p| p.len() >= 2 && is_partner_coalition(g, *p))
        .collect()
}

/// Symmetric partnership: members of a partner coalition `p` get equal payoffs.
pub fn check_symmetric_partnership<S: Scalar>(kind: ValueKind, g: &IncompleteGame<S>, p: Coalition) -> Result<AxiomReport> {
    let axiom = Axiom::SymmetricPartnership;
    if !p.is_subset_of(Coalition::grand(g.players())) || p.len() < 2 {
        return Err(GameError::Input(format!("{p} is not a coalition of at least two players")));
    }
    if !is_partner_coalition(g, p) {
        return Ok(AxiomReport::inapplicable(axiom, kind, format!("{p} is not a coalition of partners")));
    }
    let Some(payoffs) = try_value(g, kind)? else {
        return Ok(AxiomReport::inapplicable(axiom, kind, outside_domain(kind, "the game")));
    };
    let members: Vec<usize> = p.indices().collect();
    let mut worst = Worst::new();
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            worst.compare(
                &payoffs[i],
                &payoffs[j],
                || format!("payoffs of partners {} and {}", player(i), player(j)),
                vec![p],
            );
        }
    }
    Ok(AxiomReport::judged(axiom, kind, violation_threshold::<S>(), worst.0))
}

/// Every single-game check for `kind`: efficiency, φ-consistency, fairness at
/// each proper known coalition, balanced contributions for each pair and
/// symmetric partnership for each partner coalition.
pub fn audit<S: Scalar>(g: &IncompleteGame<S>, kind: ValueKind) -> Result<Vec<AxiomReport>> {
    let n = g.players();
    let mut out = vec![
        check_basic(kind, Axiom::Efficiency, g, None)?,
        check_basic(kind, Axiom::PhiConsistency, g, None)?,
    ];
    let grand = Coalition::grand(n);
    for s in g.system().members().filter(|s| !s.is_empty() && *s != grand) {
        out.push(check_fairness(kind, g, s)?);
    }
    if n >= 2 {
        for i in 0..n {
            for j in i + 1..n {
                out.push(check_balanced_contributions(kind, g, i, j)?);
            }
        }
    }
    for p in find_partner_coalitions(g) {
        out.push(check_symmetric_partnership(kind, g, p)?);
    }
    Ok(out)
}
