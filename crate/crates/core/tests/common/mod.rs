//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_traits::{One, Zero};
use rand::Rng as _;
use udvalue::rng::Rng;
use udvalue::setsys::{all_coalitions, Coalition, SetSystem};
use udvalue::{gamefile, ExactIncomplete, Rational, Scalar};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn load(name: &str) -> ExactIncomplete {
    gamefile::read_game(fixture(name)).expect("fixture parses")
}

pub fn q(a: i64, b: i64) -> Rational {
    Rational::from_ratio(a, b)
}

/// `d(S) = Σ_{T ⊆ S} (-1)^{|S|-|T|} v(T)` by direct double loop.
pub fn naive_moebius<S: Scalar>(values: &[S]) -> Vec<S> {
    (0..values.len())
        .map(|s| {
            (0..values.len())
                .filter(|t| t & s == *t)
                .fold(S::zero(), |acc, t| {
                    let sign = (s as u32).count_ones() - (t as u32).count_ones();
                    if sign.is_multiple_of(2) {
                        acc + values[t].clone()
                    } else {
                        acc - values[t].clone()
                    }
                })
        })
        .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut next = p.clone();
            next.insert(pos, n - 1);
            out.push(next);
        }
    }
    out
}

/// Average marginal contribution over all player orders.
pub fn permutation_shapley<S: Scalar>(n: usize, values: &[S]) -> Vec<S> {
    let perms = permutations(n);
    let mut phi = vec![S::zero(); n];
    for order in &perms {
        let mut mask = 0usize;
        for &i in order {
            let next = mask | 1 << i;
            phi[i] = phi[i].clone() + values[next].clone() - values[mask].clone();
            mask = next;
        }
    }
    let count = S::from_i64(perms.len() as i64);
    phi.into_iter().map(|x| x / count.clone()).collect()
}

/// Closure by scanning every member.
pub fn naive_closure(system: &SetSystem, t: Coalition) -> Coalition {
    system
        .members()
        .filter(|s| t.is_subset_of(*s))
        .fold(system.grand(), |acc, s| acc.intersection(s))
}

/// Reduces `[a | b]` in place; returns `(pivot columns, consistent)`.
pub fn gauss(rows: &mut [Vec<Rational>], width: usize) -> (Vec<usize>, bool) {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..width {
        let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][c].is_zero() {
                let f = rows[k][c].clone();
                let pivot_row = rows[r].clone();
                for (x, y) in rows[k].iter_mut().zip(pivot_row) {
                    *x = x.clone() - f.clone() * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let consistent = rows[r..].iter().all(|row| row[width].is_zero());
    (pivots, consistent)
}

/// Verdict of the two-point oracle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoPoint {
    /// Two random solutions have the same Shapley image.
    pub images_equal: bool,
    /// Some null-space basis vector has a nonzero Shapley image.
    pub basis_witness: bool,
}

/// One unknown dividend per nonempty coalition; rows `Σ_{T ⊆ S} δ(T) = v(S)`
/// for `S ∈ K` and `δ(X) = δ(Y)` whenever the closures agree. A random
/// integer game is solved, two random solutions are drawn and both Shapley
/// images compared.
pub fn two_point_oracle(system: &SetSystem, rng: &mut Rng) -> TwoPoint {
    let n = system.players();
    let vars: Vec<Coalition> = all_coalitions(n).filter(|c| !c.is_empty()).collect();
    let width = vars.len();
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    for s in system.members().filter(|c| !c.is_empty()) {
        let mut row: Vec<Rational> = vars
            .iter()
            .map(|x| if x.is_subset_of(s) { Rational::one() } else { Rational::zero() })
            .collect();
        row.push(Rational::from_i64(rng.random_range(-9..=9)));
        rows.push(row);
    }
    let closures: Vec<Coalition> = vars.iter().map(|&x| naive_closure(system, x)).collect();
    for a in 0..width {
        if let Some(b) = (a + 1..width).find(|&b| closures[b] == closures[a]) {
            let mut row = vec![Rational::zero(); width + 1];
            row[a] = Rational::one();
            row[b] = -Rational::one();
            rows.push(row);
        }
    }
    let (pivots, consistent) = gauss(&mut rows, width);
    assert!(consistent, "the dividend system always has a solution");
    let free: Vec<usize> = (0..width).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<Rational>> = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); width];
            v[f] = Rational::one();
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -rows[r][f].clone();
            }
            v
        })
        .collect();
    let mut particular = vec![Rational::zero(); width];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = rows[r][width].clone();
    }
    let image = |x: &[Rational]| -> Vec<Rational> {
        (0..n)
            .map(|i| {
                vars.iter()
                    .zip(x)
                    .filter(|(c, _)| c.contains(i))
                    .fold(Rational::zero(), |acc, (c, d)| acc + d.clone() / Rational::from_i64(c.len() as i64))
            })
            .collect()
    };
    let point = |rng: &mut Rng| {
        let mut x = particular.clone();
        for b in &basis {
            let t = q(rng.random_range(-1_000_000..=1_000_000), rng.random_range(1..=997));
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi = xi.clone() + t.clone() * bi.clone();
            }
        }
        x
    };
    let x1 = point(rng);
    let x2 = point(rng);
    TwoPoint {
        images_equal: image(&x1) == image(&x2),
        basis_witness: basis.iter().any(|b| image(b).iter().any(|v| !v.is_zero())),
    }
}
