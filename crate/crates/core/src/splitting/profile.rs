use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    transition_solve, CandidateOptions, CandidateSet, Constants, HarmonicEntry, Mode, Source,
    SplittingError,
};
use crate::resonance::{IntVec2, ResonanceAnalysis};

/// Relative gap below which two competing values count as a tie.
pub const TIE_TOLERANCE: f64 = 1e-3;

/// Dominant harmonics at one `ε`, as indices into the candidate set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dominant {
    pub s1: usize,
    pub h1: f64,
    pub s2: usize,
    pub h2: f64,
    /// Best value independent of `S₁` among the remaining directions.
    pub h3: f64,
    pub flagged: bool,
}

fn better(set: &CandidateSet, (ga, a): (f64, usize), (gb, b): (f64, usize)) -> bool {
    ga < gb || (ga == gb && set.entries[a].k < set.entries[b].k)
}

/// `S₁`, `h₁`, `S₂`, `h₂` at `ln ε`. Ties break towards the
/// lexicographically smaller `k`. The sample is flagged when `h₂/h₁` or
/// `h₃/h₂` is within [`TIE_TOLERANCE`] of one.
pub fn dominant_harmonics(set: &CandidateSet, ln_eps: f64) -> Result<Dominant, SplittingError> {
    let g: Vec<f64> = set.entries.iter().map(|e| e.g_ln(ln_eps)).collect();
    let pick = |skip: &dyn Fn(usize) -> bool| {
        let mut best: Option<(f64, usize)> = None;
        for (i, &gi) in g.iter().enumerate() {
            if skip(i) {
                continue;
            }
            if best.is_none_or(|b| better(set, (gi, i), b)) {
                best = Some((gi, i));
            }
        }
        best
    };
    let (h1, s1) = pick(&|_| false).ok_or(SplittingError::NoIndependentCandidate)?;
    let e1 = &set.entries[s1];
    let (h2, s2) =
        pick(&|i| set.entries[i].is_collinear(e1)).ok_or(SplittingError::NoIndependentCandidate)?;
    let e2 = &set.entries[s2];
    let h3 = pick(&|i| set.entries[i].is_collinear(e1) || set.entries[i].is_collinear(e2))
        .map_or(f64::INFINITY, |(h, _)| h);
    let flagged = (h2 - h1) / h1 < TIE_TOLERANCE || (h3 - h2) / h2 < TIE_TOLERANCE;
    Ok(Dominant {
        s1,
        h1,
        s2,
        h2,
        h3,
        flagged,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransitionKind {
    #[serde(rename = "S1-change")]
    S1Change,
    #[serde(rename = "S2-change")]
    S2Change,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionPoint {
    pub eps_star: f64,
    pub ln_eps_star: f64,
    pub kind: TransitionKind,
    /// Dominant harmonic below and above `eps_star`.
    pub pair: [IntVec2; 2],
    pub sources: [Source; 2],
    /// `|g_A − g_B|/g_A` at `eps_star`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileSample {
    pub eps: f64,
    pub ln_eps: f64,
    pub h1: f64,
    pub h2: f64,
    pub s1: IntVec2,
    pub s2: IntVec2,
    pub s1_source: Source,
    pub s2_source: Source,
    pub flagged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub eps_lo: f64,
    pub eps_hi: f64,
    pub samples: usize,
    pub mode: Mode,
    pub rho: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            eps_lo: 1e-8,
            eps_hi: 1e-4,
            samples: 400,
            mode: Mode::Exact,
            rho: 1.0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SplittingProfile {
    pub word: String,
    pub mode: Mode,
    pub rho: f64,
    #[serde(rename = "C0")]
    pub c0: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    pub gamma_star: f64,
    pub lambda: f64,
    /// Level `H` below which the candidate set is complete.
    pub threshold: f64,
    pub samples: Vec<ProfileSample>,
    pub transitions: Vec<TransitionPoint>,
}

/// Evaluates `h₁`, `h₂` on a log-spaced grid and locates the label changes.
///
/// The candidate level starts at 4 and doubles until `h₂ < H` at every sample.
pub fn profile(
    analysis: &ResonanceAnalysis,
    config: &ProfileConfig,
) -> Result<SplittingProfile, SplittingError> {
    if config.samples < 2 {
        return Err(SplittingError::TooFewSamples {
            min: 2,
            got: config.samples,
        });
    }
    let mut threshold = 4.0;
    loop {
        let set = CandidateSet::build(
            analysis,
            config.eps_lo,
            config.eps_hi,
            CandidateOptions {
                threshold,
                rho: config.rho,
                mode: config.mode,
            },
        )?;
        let ln_lo = config.eps_lo.ln();
        let ln_hi = config.eps_hi.ln();
        let step = (ln_hi - ln_lo) / (config.samples - 1) as f64;
        let grid: Vec<f64> = (0..config.samples)
            .map(|i| {
                if i + 1 == config.samples {
                    ln_hi
                } else {
                    ln_lo + step * i as f64
                }
            })
            .collect();
        let doms = grid
            .par_iter()
            .map(|&x| dominant_harmonics(&set, x))
            .collect::<Result<Vec<_>, _>>()?;
        if doms.iter().any(|d| d.h2 >= threshold) && threshold < 64.0 {
            threshold *= 2.0;
            continue;
        }
        let transitions = find_transitions(&set, &grid, &doms)?;
        let samples = grid
            .iter()
            .zip(&doms)
            .map(|(&x, d)| sample(&set, x, d))
            .collect();
        return Ok(SplittingProfile {
            word: analysis.cf.word(),
            mode: config.mode,
            rho: config.rho,
            c0: set.constants.c0,
            d0: set.constants.d0,
            gamma_star: set.constants.gamma_star,
            lambda: analysis.lambda_f64(),
            threshold,
            samples,
            transitions,
        });
    }
}

fn sample(set: &CandidateSet, ln_eps: f64, d: &Dominant) -> ProfileSample {
    let (e1, e2) = (&set.entries[d.s1], &set.entries[d.s2]);
    ProfileSample {
        eps: ln_eps.exp(),
        ln_eps,
        h1: d.h1,
        h2: d.h2,
        s1: e1.k.clone(),
        s2: e2.k.clone(),
        s1_source: e1.source,
        s2_source: e2.source,
        flagged: d.flagged,
    }
}

fn label(d: &Dominant, kind: TransitionKind) -> usize {
    match kind {
        TransitionKind::S1Change => d.s1,
        TransitionKind::S2Change => d.s2,
    }
}

fn find_transitions(
    set: &CandidateSet,
    grid: &[f64],
    doms: &[Dominant],
) -> Result<Vec<TransitionPoint>, SplittingError> {
    let mut out = Vec::new();
    for i in 1..grid.len() {
        let (da, db) = (&doms[i - 1], &doms[i]);
        let kind = if da.s1 != db.s1 {
            TransitionKind::S1Change
        } else if da.s2 != db.s2 {
            TransitionKind::S2Change
        } else {
            continue;
        };
        refine(set, kind, (grid[i - 1], *da), (grid[i], *db), 0, &mut out)?;
    }
    Ok(out)
}

/// Locates every change of the `kind` label in `(a, b)`: the closed-form
/// crossing is accepted when the labels on both sides of it match, otherwise
/// the bracket is bisected.
fn refine(
    set: &CandidateSet,
    kind: TransitionKind,
    (xa, da): (f64, Dominant),
    (xb, db): (f64, Dominant),
    depth: usize,
    out: &mut Vec<TransitionPoint>,
) -> Result<(), SplittingError> {
    let (ia, ib) = (label(&da, kind), label(&db, kind));
    if ia == ib {
        return Ok(());
    }
    let (ea, eb) = (&set.entries[ia], &set.entries[ib]);
    if let Some(eps) = transition_solve(ea, eb)? {
        let x = eps.ln();
        if x > xa && x < xb {
            let delta = 1e-9 * (xb - xa).max(1e-6);
            let below = dominant_harmonics(set, x - delta)?;
            let above = dominant_harmonics(set, x + delta)?;
            if label(&below, kind) == ia && label(&above, kind) == ib {
                refine(set, kind, (xa, da), (x - delta, below), depth, out)?;
                let (ga, gb) = (ea.g_ln(x), eb.g_ln(x));
                out.push(TransitionPoint {
                    eps_star: eps,
                    ln_eps_star: x,
                    kind,
                    pair: [ea.k.clone(), eb.k.clone()],
                    sources: [ea.source, eb.source],
                    gap: (ga - gb).abs() / ga,
                });
                return refine(set, kind, (x + delta, above), (xb, db), depth, out);
            }
        }
    }
    if depth > 60 || xb - xa < 1e-12 {
        log::warn!("unresolved {kind:?} change near ln eps = {xa}");
        return Ok(());
    }
    let xm = 0.5 * (xa + xb);
    let dm = dominant_harmonics(set, xm)?;
    refine(set, kind, (xa, da), (xm, dm), depth + 1, out)?;
    refine(set, kind, (xm, dm), (xb, db), depth + 1, out)
}

/// Minimum of `h₁` over `[eps_a, eps_b]` with its argmin harmonic.
pub fn envelope_minimum(
    set: &CandidateSet,
    eps_a: f64,
    eps_b: f64,
) -> Option<(f64, &HarmonicEntry)> {
    set.envelope_minimum(eps_a.ln(), eps_b.ln())
}

impl SplittingProfile {
    pub fn constants(&self) -> Constants {
        Constants {
            gamma_star: self.gamma_star,
            rho: self.rho,
            c0: self.c0,
            d0: self.d0,
        }
    }

    /// CSV with `#` metadata lines; reals carry 12 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "# word: {}", self.word)?;
        writeln!(w, "# mode: {}", self.mode)?;
        writeln!(w, "# rho: {:.11e}", self.rho)?;
        writeln!(w, "# C0: {:.11e}", self.c0)?;
        writeln!(w, "# D0: {:.11e}", self.d0)?;
        writeln!(w, "# gamma_star: {:.11e}", self.gamma_star)?;
        writeln!(w, "# lambda: {:.11e}", self.lambda)?;
        writeln!(w, "eps,ln_eps,h1,h2,S1_k1,S1_k2,S2_k1,S2_k2,flagged")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:.11e},{:.11e},{:.11e},{:.11e},{},{},{},{},{}",
                s.eps, s.ln_eps, s.h1, s.h2, s.s1.k1, s.s1.k2, s.s2.k1, s.s2.k2, s.flagged
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analysis(word: &str) -> ResonanceAnalysis {
        ResonanceAnalysis::new(&word.parse().unwrap()).unwrap()
    }

    fn limit_set(a: &ResonanceAnalysis, lo: f64, hi: f64) -> CandidateSet {
        let opts = CandidateOptions {
            mode: Mode::Limit,
            ..Default::default()
        };
        CandidateSet::build(a, lo, hi, opts).unwrap()
    }

    #[test]
    fn primary_peak_gives_unit_h1() {
        let a = analysis("1,2");
        let set = limit_set(&a, 1e-8, 1e-4);
        for e in set.entries.iter().filter(|e| {
            matches!(e.source, Source::Sequence { j, .. } if j == a.j0)
                && e.eps_peak > 1e-8
                && e.eps_peak < 1e-4
        }) {
            let d = dominant_harmonics(&set, e.ln_eps_peak).unwrap();
            assert_eq!(set.entries[d.s1].k, e.k);
            assert!((d.h1 - 1.0).abs() < 1e-14);
            assert!(d.h2 > d.h1);
        }
    }

    #[test]
    fn midway_s2_is_main_secondary() {
        let a = analysis("1,2");
        let set = limit_set(&a, 1e-8, 1e-4);
        let mut peaks: Vec<f64> = set
            .entries
            .iter()
            .filter(|e| matches!(e.source, Source::Sequence { j, .. } if j == a.j0))
            .map(|e| e.ln_eps_peak)
            .filter(|&x| x > (1e-8f64).ln() && x < (1e-4f64).ln())
            .collect();
        peaks.sort_by(f64::total_cmp);
        let fam1 = a.main_secondary().family;
        for w in peaks.windows(2) {
            let d = dominant_harmonics(&set, 0.5 * (w[0] + w[1])).unwrap();
            match set.entries[d.s2].source {
                Source::Sequence { j, .. } => {
                    assert_eq!(a.sequence(j).map(|s| s.family), Some(fam1))
                }
                Source::Sporadic => panic!("sporadic S2 in limit mode"),
            }
        }
    }

    #[test]
    fn profile_transitions_balance_g() {
        let a = analysis("1,2");
        let cfg = ProfileConfig {
            eps_lo: 1e-7,
            eps_hi: 1e-5,
            samples: 200,
            mode: Mode::Limit,
            rho: 1.0,
        };
        let p = profile(&a, &cfg).unwrap();
        assert_eq!(p.samples.len(), 200);
        assert!(!p.transitions.is_empty());
        for t in &p.transitions {
            assert!(t.gap < 1e-10, "{t:?}");
            assert!(t.eps_star > 1e-7 && t.eps_star < 1e-5);
        }
        for s in &p.samples {
            assert!(1.0 - 1e-12 <= s.h1 && s.h1 <= s.h2);
        }
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 201);
    }

    #[test]
    fn too_few_samples() {
        let a = analysis("1");
        let cfg = ProfileConfig {
            samples: 1,
            ..Default::default()
        };
        assert!(matches!(
            profile(&a, &cfg),
            Err(SplittingError::TooFewSamples { .. })
        ));
    }
}
