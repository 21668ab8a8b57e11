//! The price-of-anarchy lower-bound construction: an instance built in
//! phases, a designed optimal packing by levels and a designed NE packing
//! made of three bin types.

use std::fmt;
use std::sync::Arc;

use num::{BigInt, One};
use serde::{Deserialize, Serialize};

use crate::bounds::poa_lower;
use crate::error::{domain, Error, Result};
use crate::game::{first_improving_move, ImprovingMove};
use crate::model::{validate_packing, Instance, ItemId, Packing};
use crate::rational::{big_pow, frac, int, pow2, to_decimal, to_pq, Rational};

/// How `r_{j+1}` is derived from `r_j`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Recurrence {
    /// `r_1 = n/(t+1)` and `r_{j+1} = (r_j − 1)/((t+1) 2^{j−1})`, `d_{j+1} = r_j − r_{j+1}`.
    #[default]
    Printed,
    /// `r_{j+1} = (r_j − 1)/((t+1) 2^j)` from `r_0 = n`. This is the variant
    /// under which every phase-`j` NE bin receives its full
    /// `(t+1) 2^{j−1} − 1` pairs, i.e. `d_j = ((t+1) 2^{j−1} − 1) r_j + 1`.
    Balanced,
}

impl std::str::FromStr for Recurrence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Recurrence> {
        match s {
            "printed" => Ok(Recurrence::Printed),
            "balanced" => Ok(Recurrence::Balanced),
            other => Err(Error::Domain(format!("unknown recurrence `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Every `r_j` must come out integral.
    #[default]
    Exact,
    /// Round each `r_{j+1}` down, so any large enough `n` works.
    Floor,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "exact" => Ok(Mode::Exact),
            "floor" => Ok(Mode::Floor),
            other => Err(Error::Domain(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoaParams {
    pub t: u32,
    pub s: u32,
    pub n: u64,
    pub mode: Mode,
    pub recurrence: Recurrence,
    /// `r[0..=s]`, `r[0] = n`.
    pub r: Vec<u64>,
    /// `d[0..=s]`, `d[0] = 0`.
    pub d: Vec<u64>,
}

impl PoaParams {
    pub fn new(t: u32, s: u32, n: u64, mode: Mode, recurrence: Recurrence) -> Result<PoaParams> {
        if t < 2 {
            return Err(domain("t", &int(t as i64)));
        }
        if !(2..=6).contains(&s) {
            return Err(domain("s", &int(s as i64)));
        }
        if n <= t as u64 {
            return Err(Error::Domain(format!("n = {n} must exceed t = {t}")));
        }
        if mode == Mode::Exact && s <= 2 && n <= 1u64 << (s * s * s) {
            return Err(Error::Domain(format!(
                "n = {n} must exceed 2^{}",
                s * s * s
            )));
        }
        let (r, d) = sequences(t, s, n, mode, recurrence)?;
        Ok(PoaParams {
            t,
            s,
            n,
            mode,
            recurrence,
            r,
            d,
        })
    }

    /// `δ_j = (4n)^{−(3s−2j)}`.
    pub fn delta(&self, j: u32) -> Rational {
        let four_n = (4 * self.n) as i64;
        Rational::new(BigInt::one(), big_pow(four_n, 3 * self.s - 2 * j))
    }

    /// `Δ = 2 δ_0 / (n t (t−1) + 1)`.
    pub fn big_delta(&self) -> Rational {
        int(2) * self.delta(0) / int(self.phase0_pairs() as i64 + 1)
    }

    /// `t (t−1) n`: the number of level-0 bins.
    pub fn phase0_pairs(&self) -> u64 {
        let t = self.t as u64;
        t * (t - 1) * self.n
    }

    /// `(t(t−1) + 1) n`.
    pub fn opt_bound(&self) -> u64 {
        let t = self.t as u64;
        (t * (t - 1) + 1) * self.n
    }

    /// `t² n − 1 + Σ_{j≥1} r_j`.
    pub fn designed_ne_bins(&self) -> u64 {
        let t = self.t as u64;
        t * t * self.n - 1 + self.r[1..].iter().sum::<u64>()
    }

    /// Pairs a phase-`j` NE bin holds: `(t+1) 2^{j−1} − 1`.
    pub fn pairs_per_bin(&self, j: u32) -> u64 {
        (self.t as u64 + 1) * (1 << (j - 1)) - 1
    }
}

fn sequences(
    t: u32,
    s: u32,
    n: u64,
    mode: Mode,
    recurrence: Recurrence,
) -> Result<(Vec<u64>, Vec<u64>)> {
    let t1 = t as u64 + 1;
    let mut r = vec![n];
    let mut d = vec![0];
    for j in 0..s {
        let prev = r[j as usize];
        let (numerator, divisor) = match (recurrence, j) {
            (Recurrence::Printed, 0) => (prev, t1),
            (Recurrence::Printed, j) => (prev.saturating_sub(1), t1 << (j - 1)),
            (Recurrence::Balanced, j) => (prev.saturating_sub(1), t1 << j),
        };
        if mode == Mode::Exact && numerator % divisor != 0 {
            return Err(Error::Integrality(format!(
                "r_{} = {numerator}/{divisor} is not an integer",
                j + 1
            )));
        }
        let next = numerator / divisor;
        if next == 0 {
            return Err(Error::Domain(format!(
                "n = {n} is too small: r_{} = 0",
                j + 1
            )));
        }
        let dn = match (recurrence, j) {
            (Recurrence::Printed, 0) => prev - next,
            _ => (divisor - 1) * next + 1,
        };
        r.push(next);
        d.push(dn);
    }
    Ok((r, d))
}

/// Smallest `n > max(2^{s³}, t)` for which every `r_j` is integral.
pub fn min_valid_n(t: u32, s: u32, recurrence: Recurrence) -> Result<u64> {
    if t < 2 {
        return Err(domain("t", &int(t as i64)));
    }
    if !(2..=3).contains(&s) {
        return Err(domain("s", &int(s as i64)));
    }
    let start = (1u64 << (s * s * s)).max(t as u64) + 1;
    (start..)
        .find(|&n| sequences(t, s, n, Mode::Exact, recurrence).is_ok())
        .ok_or_else(|| Error::Domain("no valid n".into()))
}

/// Role of a bin in the designed NE packing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NeBinKind {
    /// `(t−1)` items `σ02` plus one `σ01`.
    Second,
    /// `(t−2)` items `σ05` plus a pair `σ03^{i+1}, σ04^i`.
    Third,
    /// `σ_j` plus pairs `π_j^{i+1}, θ_j^i`.
    Phase(u32),
}

impl fmt::Display for NeBinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NeBinKind::Second => write!(f, "second"),
            NeBinKind::Third => write!(f, "third"),
            NeBinKind::Phase(j) => write!(f, "phase-{j}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConstructionBundle {
    pub params: PoaParams,
    pub instance: Arc<Instance>,
    pub opt: Packing,
    pub ne: Packing,
    /// One entry per NE bin, in bin order.
    pub ne_kinds: Vec<NeBinKind>,
    /// Item family label per item id, e.g. `sigma03^7` or `pi_2^5`.
    pub labels: Vec<String>,
    pub notes: Vec<String>,
}

/// Item ids by family. Indices follow the construction: `s03[i]` is
/// `σ03^i` for `1 <= i <= t(t−1)n`, slot 0 unused; `None` marks removed items.
struct Families {
    s01: Vec<ItemId>,
    s02: Vec<ItemId>,
    s03: Vec<Option<ItemId>>,
    s04: Vec<Option<ItemId>>,
    s05: Vec<ItemId>,
    sigma: Vec<Vec<ItemId>>,
    pi: Vec<Vec<Option<ItemId>>>,
    theta: Vec<Vec<Option<ItemId>>>,
}

struct Builder {
    sizes: Vec<Rational>,
    labels: Vec<String>,
}

impl Builder {
    fn push(&mut self, size: Rational, label: String) -> ItemId {
        self.sizes.push(size);
        self.labels.push(label);
        ItemId(self.sizes.len() - 1)
    }

    fn repeat(&mut self, size: &Rational, count: u64, label: &str) -> Vec<ItemId> {
        (0..count)
            .map(|_| self.push(size.clone(), label.to_string()))
            .collect()
    }
}

/// Builds the post-removal instance with both designed packings.
pub fn gen_poa_lower(
    t: u32,
    s: u32,
    n: u64,
    mode: Mode,
    recurrence: Recurrence,
) -> Result<ConstructionBundle> {
    let params = PoaParams::new(t, s, n, mode, recurrence)?;
    let tt = t as u64;
    let big_t = params.phase0_pairs();
    let inv = frac(1, tt as i64 + 1);
    let dd = params.big_delta();
    let n_r = int(n as i64);
    let t_r = int(t as i64);
    let nt1 = &n_r * &t_r * int(t as i64 - 1);

    let mut b = Builder {
        sizes: Vec::new(),
        labels: Vec::new(),
    };
    let s01 = &inv + &dd * &nt1 * &t_r + &dd;
    let s02 = &inv - &dd * &nt1;
    let s01_ids = b.repeat(&s01, n * tt, "sigma01");
    let s02_ids = b.repeat(&s02, big_t, "sigma02");
    let mut s03 = vec![None];
    for i in 1..=big_t {
        s03.push((i != 1).then(|| {
            b.push(
                &inv + &dd * &nt1 + int(i as i64) * &dd,
                format!("sigma03^{i}"),
            )
        }));
    }
    let mut s04 = vec![None];
    for i in 1..=big_t {
        s04.push((i != big_t).then(|| b.push(&inv - int(i as i64) * &dd, format!("sigma04^{i}"))));
    }
    let s05_ids = b.repeat(&inv, (tt - 2) * big_t - (tt - 2), "sigma05");

    let mut sigma = vec![Vec::new()];
    let mut pi = vec![Vec::new()];
    let mut theta = vec![Vec::new()];
    for j in 1..=s {
        let dj = params.d[j as usize];
        let delta = params.delta(j);
        let base = Rational::new(BigInt::one(), BigInt::from(tt + 1) * pow2(j));
        let sj = &base + int(2 * (dj as i64 + 1)) * &delta;
        sigma.push(b.repeat(&sj, params.r[j as usize], &format!("sigma_{j}")));
        let mut p = vec![None; dj as usize + 1];
        for i in 2..=dj {
            p[i as usize] = Some(b.push(
                &base + int(2 * i as i64 - 1) * &delta,
                format!("pi_{j}^{i}"),
            ));
        }
        let mut q = vec![None; dj as usize + 1];
        for i in 1..dj {
            q[i as usize] =
                Some(b.push(&base - int(2 * i as i64) * &delta, format!("theta_{j}^{i}")));
        }
        pi.push(p);
        theta.push(q);
    }
    let fam = Families {
        s01: s01_ids,
        s02: s02_ids,
        s03,
        s04,
        s05: s05_ids,
        sigma,
        pi,
        theta,
    };

    let instance = Instance::new(frac(1, t as i64), b.sizes)
        .map_err(|e| Error::Domain(format!("construction breaks the size cap: {e}")))?;
    let instance = Arc::new(instance);

    let opt_bins = opt_bins(&params, &fam);
    let opt = Packing::from_bins_unchecked(Arc::clone(&instance), opt_bins);
    let (ne_bins, ne_kinds, mut notes) = ne_bins(&params, &fam);
    let ne = Packing::from_bins_unchecked(Arc::clone(&instance), ne_bins);
    if mode == Mode::Floor {
        notes
            .push("floor mode: optimal-packing slots for σ_j are filled while items remain".into());
    }
    Ok(ConstructionBundle {
        params,
        instance,
        opt,
        ne,
        ne_kinds,
        labels: b.labels,
        notes,
    })
}

fn opt_bins(params: &PoaParams, fam: &Families) -> Vec<Vec<ItemId>> {
    let (t, s, n) = (params.t as usize, params.s as usize, params.n);
    let big_t = params.phase0_pairs() as usize;
    let mut bins = Vec::new();
    let mut s05 = fam.s05.iter();
    for i in 1..=big_t {
        let mut bin: Vec<ItemId> = s05.by_ref().take(t - 2).copied().collect();
        bin.push(fam.s02[i - 1]);
        bin.extend(fam.s03[i]);
        bin.extend(fam.s04[i]);
        bins.push(bin);
    }
    let mut s01 = fam.s01.iter();
    let mut sigma: Vec<_> = fam.sigma.iter().map(|v| v.iter()).collect();
    let upper_levels: u64 = n - params.d[1..].iter().sum::<u64>();
    let levels = (1..=s).flat_map(|j| (1..=params.d[j] as usize).map(move |i| (j, Some(i))));
    let top = (0..upper_levels).map(|_| (s + 1, None));
    for (j, pair) in levels.chain(top) {
        let mut bin: Vec<ItemId> = s01.by_ref().take(t).copied().collect();
        for it in sigma.iter_mut().take(j).skip(1) {
            bin.extend(it.next());
        }
        if let Some(i) = pair {
            bin.extend(fam.pi[j][i]);
            bin.extend(fam.theta[j][i]);
        }
        bins.push(bin);
    }
    bins.retain(|b| !b.is_empty());
    bins
}

fn ne_bins(params: &PoaParams, fam: &Families) -> (Vec<Vec<ItemId>>, Vec<NeBinKind>, Vec<String>) {
    let t = params.t as usize;
    let big_t = params.phase0_pairs() as usize;
    let mut bins = Vec::new();
    let mut kinds = Vec::new();
    let mut notes = Vec::new();
    let mut s02 = fam.s02.iter();
    for &id in &fam.s01 {
        let mut bin = vec![id];
        bin.extend(s02.by_ref().take(t - 1));
        bins.push(bin);
        kinds.push(NeBinKind::Second);
    }
    let mut s05 = fam.s05.iter();
    for i in 1..big_t {
        let mut bin: Vec<ItemId> = s05.by_ref().take(t - 2).copied().collect();
        bin.extend(fam.s03[i + 1]);
        bin.extend(fam.s04[i]);
        bins.push(bin);
        kinds.push(NeBinKind::Third);
    }
    for j in 1..=params.s {
        let ju = j as usize;
        let per_bin = params.pairs_per_bin(j) as usize;
        let dj = params.d[ju] as usize;
        let mut pairs = (1..dj).map(|i| [fam.pi[ju][i + 1], fam.theta[ju][i]]);
        let mut short = 0;
        for &sigma in &fam.sigma[ju] {
            let mut bin = vec![sigma];
            let mut got = 0;
            for pair in pairs.by_ref().take(per_bin) {
                bin.extend(pair.into_iter().flatten());
                got += 1;
            }
            short += per_bin - got;
            bins.push(bin);
            kinds.push(NeBinKind::Phase(j));
        }
        if short > 0 {
            notes.push(format!(
                "phase {j}: {} pairs available for {} bins of {per_bin} pairs, {short} missing",
                dj.saturating_sub(1),
                fam.sigma[ju].len()
            ));
        }
        let rest: Vec<_> = pairs.collect();
        if !rest.is_empty() {
            notes.push(format!(
                "phase {j}: {} surplus pairs packed into extra bins",
                rest.len()
            ));
            for chunk in rest.chunks(per_bin) {
                bins.push(
                    chunk
                        .iter()
                        .flat_map(|p| p.iter().flatten().copied())
                        .collect(),
                );
                kinds.push(NeBinKind::Phase(j));
            }
        }
    }
    (bins, kinds, notes)
}

/// One named pass/fail entry of a construction report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ConstructionReport {
    /// Labelled `a-optimal-packing`, `b-monotone-loads`, `c-nash`,
    /// `d-phase-counts` and `e-ratio`.
    pub checks: Vec<Check>,
    pub ne_bins: usize,
    pub opt_bins: usize,
    pub ratio: Rational,
    pub bound: Rational,
    /// `ratio >= poa_lower(t, s)` without slack.
    pub ratio_meets_bound_exactly: bool,
    pub witness: Option<ImprovingMove>,
}

impl ConstructionReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, prefix: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name.starts_with(prefix))
    }

    pub fn render(&self) -> String {
        let value = serde_json::json!({
            "passed": self.passed(),
            "ne_bins": self.ne_bins,
            "opt_bins": self.opt_bins,
            "ratio": to_pq(&self.ratio),
            "bound": to_pq(&self.bound),
            "ratio_meets_bound_exactly": self.ratio_meets_bound_exactly,
            "witness": self.witness.as_ref().map(|m| m.to_string()),
            "checks": self.checks,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("report serializes");
        out.push('\n');
        out
    }
}

fn check(name: &str, passed: bool, detail: String) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

/// Re-derives every designed property of the bundle with exact arithmetic.
pub fn verify_poa_construction(bundle: &ConstructionBundle) -> ConstructionReport {
    let p = &bundle.params;
    let mut checks = Vec::new();

    let opt_report = validate_packing(&bundle.opt);
    let opt_ok = opt_report.is_valid() && bundle.opt.bin_count() as u64 <= p.opt_bound();
    let detail = match opt_report.violations.first() {
        Some(v) => format!("{v}"),
        None => format!("{} bins, bound {}", bundle.opt.bin_count(), p.opt_bound()),
    };
    checks.push(check("a-optimal-packing", opt_ok, detail));

    let ne_report = validate_packing(&bundle.ne);
    let loads = if ne_report.is_valid() {
        Some(bundle.ne.loads())
    } else {
        None
    };
    checks.push(monotone_check(bundle, loads.as_deref()));

    let (nash_ok, witness, detail) = match ne_report.violations.first() {
        Some(v) => (false, None, format!("NE packing invalid: {v}")),
        None => match first_improving_move(&bundle.ne) {
            Some(m) => {
                let d = format!("improving move: {m}");
                (false, Some(m), d)
            }
            None => (
                true,
                None,
                format!("{} bins, no improving move", bundle.ne.bin_count()),
            ),
        },
    };
    checks.push(check("c-nash", nash_ok, detail));

    checks.push(phase_count_check(p));

    let ne_bins = bundle.ne.bin_count();
    let opt_bins = bundle.opt.bin_count().max(1);
    let ratio = int(ne_bins as i64) / int(opt_bins as i64);
    let bound = poa_lower(p.t, p.s).expect("t >= 2, s >= 1");
    let slack = int(p.s as i64 + 1) / int(opt_bins as i64);
    let exact = ratio >= bound;
    let ratio_ok = ratio >= &bound - &slack;
    checks.push(check(
        "e-ratio",
        ratio_ok,
        format!(
            "{ne_bins}/{opt_bins} = {} vs bound {}; exact comparison {}",
            to_decimal(&ratio, 6),
            to_decimal(&bound, 6),
            if exact {
                "holds"
            } else {
                "fails, within (s+1)/OPT"
            }
        ),
    ));

    ConstructionReport {
        checks,
        ne_bins,
        opt_bins: bundle.opt.bin_count(),
        ratio,
        bound,
        ratio_meets_bound_exactly: exact,
        witness,
    }
}

fn monotone_check(bundle: &ConstructionBundle, loads: Option<&[Rational]>) -> Check {
    let name = "b-monotone-loads";
    let Some(loads) = loads else {
        return check(name, false, "NE packing invalid".into());
    };
    if loads.len() != bundle.ne_kinds.len() {
        return check(
            name,
            false,
            format!(
                "{} bins but {} bin roles recorded",
                loads.len(),
                bundle.ne_kinds.len()
            ),
        );
    }
    let p = &bundle.params;
    let phase0 = frac(p.t as i64, p.t as i64 + 1) + int(2) * p.delta(0);
    // (min, max) per phase, phase 0 holding the second and third types.
    let mut ranges: Vec<Option<(Rational, Rational)>> = vec![None; p.s as usize + 1];
    for (load, kind) in loads.iter().zip(&bundle.ne_kinds) {
        let j = match kind {
            NeBinKind::Second | NeBinKind::Third => {
                if *load != phase0 {
                    return check(
                        name,
                        false,
                        format!("{kind} bin has load {} != {}", to_pq(load), to_pq(&phase0)),
                    );
                }
                0
            }
            NeBinKind::Phase(j) => *j as usize,
        };
        let slot = &mut ranges[j];
        *slot = Some(match slot.take() {
            None => (load.clone(), load.clone()),
            Some((lo, hi)) => (lo.min(load.clone()), hi.max(load.clone())),
        });
    }
    for j in 0..p.s as usize {
        if let (Some((_, hi)), Some((lo, _))) = (&ranges[j], &ranges[j + 1]) {
            if hi >= lo {
                return check(
                    name,
                    false,
                    format!(
                        "phase {j} max load {} >= phase {} min load {}",
                        to_decimal(hi, 9),
                        j + 1,
                        to_decimal(lo, 9)
                    ),
                );
            }
        }
    }
    check(
        name,
        true,
        format!(
            "phase-0 loads equal {}, phases strictly increasing",
            to_pq(&phase0)
        ),
    )
}

/// Compares each `r_j` with `n / ((t+1)^j 2^{j(j−1)/2})`, the value whose
/// partial sums give the lower bound. Never fails.
fn phase_count_check(p: &PoaParams) -> Check {
    let mut parts = Vec::new();
    let slack = if p.mode == Mode::Floor { 3 } else { 1 };
    for j in 1..=p.s {
        let stated = Rational::new(
            BigInt::from(p.n),
            big_pow(p.t as i64 + 1, j) << ((j * (j - 1) / 2) as usize),
        );
        let implied_exp = match p.recurrence {
            Recurrence::Printed => (j - 1) * j.saturating_sub(2) / 2,
            _ => j * (j - 1) / 2,
        };
        let implied = Rational::new(
            BigInt::from(p.n),
            big_pow(p.t as i64 + 1, j) << implied_exp as usize,
        );
        let r = int(p.r[j as usize] as i64);
        let within = r <= stated && r >= &stated - int(slack);
        parts.push(format!(
            "r_{j} = {} {} stated bound {} (recurrence bound {})",
            p.r[j as usize],
            if within {
                "within"
            } else if r > stated {
                "exceeds"
            } else {
                "below"
            },
            to_pq(&stated),
            to_pq(&implied)
        ));
    }
    check("d-phase-counts", true, parts.join("; "))
}

impl ConstructionBundle {
    /// Label-run summary of the NE bin roles, in bin order.
    pub fn ne_layout(&self) -> Vec<(NeBinKind, usize)> {
        let mut out: Vec<(NeBinKind, usize)> = Vec::new();
        for &k in &self.ne_kinds {
            match out.last_mut() {
                Some((last, count)) if *last == k => *count += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::is_nash;

    #[test]
    fn printed_sequences() {
        let p = PoaParams::new(2, 2, 264, Mode::Exact, Recurrence::Printed).unwrap();
        assert_eq!(p.r, vec![264, 88, 29]);
        assert_eq!(p.d, vec![0, 176, 59]);
        assert_eq!(p.designed_ne_bins(), 1172);
        assert_eq!(p.opt_bound(), 792);
        assert_eq!(p.delta(0), Rational::new(BigInt::one(), big_pow(1056, 6)));
        assert_eq!(p.delta(1), Rational::new(BigInt::one(), big_pow(1056, 4)));
        assert_eq!(p.delta(2), Rational::new(BigInt::one(), big_pow(1056, 2)));
        assert!(matches!(
            PoaParams::new(2, 2, 263, Mode::Exact, Recurrence::Printed),
            Err(Error::Integrality(_))
        ));
    }

    #[test]
    fn minimal_n() {
        assert_eq!(min_valid_n(2, 2, Recurrence::Printed).unwrap(), 264);
        assert_eq!(min_valid_n(3, 2, Recurrence::Printed).unwrap(), 260);
        let n = min_valid_n(2, 2, Recurrence::Balanced).unwrap();
        assert_eq!(n, 274);
        let p = PoaParams::new(2, 2, n, Mode::Exact, Recurrence::Balanced).unwrap();
        assert_eq!((p.r, p.d), (vec![274, 91, 15], vec![0, 183, 76]));
    }

    /// Brute-force congruence oracle for the minimal exact `n`.
    #[test]
    fn minimal_n_matches_scan() {
        for t in 2..=4u32 {
            let t1 = t as u64 + 1;
            let printed = (257..)
                .find(|n| n % t1 == 0 && (n / t1 - 1).is_multiple_of(t1))
                .unwrap();
            assert_eq!(min_valid_n(t, 2, Recurrence::Printed).unwrap(), printed);
            let balanced = (257..)
                .find(|n| (n - 1) % t1 == 0 && ((n - 1) / t1 - 1).is_multiple_of(2 * t1))
                .unwrap();
            assert_eq!(min_valid_n(t, 2, Recurrence::Balanced).unwrap(), balanced);
        }
    }

    #[test]
    fn balanced_small_bundle_is_an_equilibrium() {
        let b = gen_poa_lower(2, 2, 274, Mode::Exact, Recurrence::Balanced).unwrap();
        let report = verify_poa_construction(&b);
        assert!(report.passed(), "{}", report.render());
        assert!(is_nash(&b.ne));
        assert_eq!(b.ne.bin_count() as u64, b.params.designed_ne_bins());
        assert!(b.notes.is_empty());
    }

    #[test]
    fn printed_bundle_is_short_of_pairs() {
        let b = gen_poa_lower(2, 2, 264, Mode::Exact, Recurrence::Printed).unwrap();
        let report = verify_poa_construction(&b);
        assert!(report.check("a-").unwrap().passed);
        assert!(!report.check("c-").unwrap().passed);
        assert!(report.witness.is_some());
        assert!(
            b.notes[0].contains("phase 1: 175 pairs available for 88 bins of 2 pairs, 1 missing"),
            "{:?}",
            b.notes
        );
        assert!(b.notes[1].contains("87 missing"), "{:?}", b.notes);
    }

    #[test]
    fn floor_mode_accepts_any_n() {
        for rec in [Recurrence::Printed, Recurrence::Balanced] {
            let b = gen_poa_lower(2, 2, 300, Mode::Floor, rec).unwrap();
            assert!(validate_packing(&b.opt).is_valid());
            assert!(validate_packing(&b.ne).is_valid());
        }
    }

    #[test]
    fn split_bin_yields_move_witness() {
        let b = gen_poa_lower(2, 2, 274, Mode::Exact, Recurrence::Balanced).unwrap();
        let mut bins = b.ne.bins().to_vec();
        let item = bins[0].pop().unwrap();
        bins.push(vec![item]);
        let mut kinds = b.ne_kinds.clone();
        kinds.push(NeBinKind::Second);
        let tampered = ConstructionBundle {
            ne: Packing::from_bins_unchecked(Arc::clone(&b.instance), bins),
            ne_kinds: kinds,
            ..b
        };
        let report = verify_poa_construction(&tampered);
        assert!(!report.check("c-").unwrap().passed);
        assert!(report.witness.is_some());
    }
}
