//! Monte-Carlo reproduction of the reference mixture simulations:
//! truncated-normal sampling by inverse CDF, deterministic shard-parallel
//! risk estimation, sigma sweeps, and the quadrature oracle the MC
//! estimates are validated against.

use crate::aux_fn::AuxiliaryFunction;
use crate::dist::DiscreteDistribution;
use crate::error::{HcbError, Result};
use crate::num::Kahan;
use crate::Scalar;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// --- Normal distribution helpers -----------------------------------------

/// Complementary error function by Cody's rational Chebyshev
/// approximations (double-precision accurate across the whole range).
#[allow(clippy::excessive_precision)]
fn erfc(x: Scalar) -> Scalar {
    const A: [Scalar; 5] = [
        3.16112374387056560e0,
        1.13864154151050156e2,
        3.77485237685302021e2,
        3.20937758913846947e3,
        1.85777706184603153e-1,
    ];
    const B: [Scalar; 4] =
        [2.36012909523441209e1, 2.44024637934444173e2, 1.28261652607737228e3, 2.84423683343917062e3];
    const C: [Scalar; 9] = [
        5.64188496988670089e-1,
        8.88314979438837594e0,
        6.61191906371416295e1,
        2.98635138197400131e2,
        8.81952221241769090e2,
        1.71204761263407058e3,
        2.05107837782607147e3,
        1.23033935479799725e3,
        2.15311535474403846e-8,
    ];
    const D: [Scalar; 8] = [
        1.57449261107098347e1,
        1.17693950891312499e2,
        5.37181101862009858e2,
        1.62138957456669019e3,
        3.29079923573345963e3,
        4.36261909014324716e3,
        3.43936767414372164e3,
        1.23033935480374942e3,
    ];
    const P: [Scalar; 6] = [
        3.05326634961232344e-1,
        3.60344899949804439e-1,
        1.25781726111229246e-1,
        1.60837851487422766e-2,
        6.58749161529837803e-4,
        1.63153871373020978e-2,
    ];
    const Q: [Scalar; 5] = [
        2.56852019228982242e0,
        1.87295284992346047e0,
        5.27905102951428412e-1,
        6.05183413124413191e-2,
        2.33520497626869185e-3,
    ];
    const SQRPI: Scalar = 5.6418958354775628695e-1;

    let y = x.abs();
    if y <= 0.46875 {
        // erfc = 1 - erf via the central rational approximation.
        let z = if y > 1.11e-16 { y * y } else { 0.0 };
        let mut xnum = A[4] * z;
        let mut xden = z;
        for i in 0..3 {
            xnum = (xnum + A[i]) * z;
            xden = (xden + B[i]) * z;
        }
        return 1.0 - x * (xnum + A[3]) / (xden + B[3]);
    }
    // The e^{-y^2} factor split for extra accuracy.
    let ysq = (y * 16.0).trunc() / 16.0;
    let del = (y - ysq) * (y + ysq);
    let scale = (-ysq * ysq).exp() * (-del).exp();
    let result = if y <= 4.0 {
        let mut xnum = C[8] * y;
        let mut xden = y;
        for i in 0..7 {
            xnum = (xnum + C[i]) * y;
            xden = (xden + D[i]) * y;
        }
        scale * (xnum + C[7]) / (xden + D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut xnum = P[5] * z;
        let mut xden = z;
        for i in 0..4 {
            xnum = (xnum + P[i]) * z;
            xden = (xden + Q[i]) * z;
        }
        let r = z * (xnum + P[4]) / (xden + Q[4]);
        (scale * (SQRPI - r) / y).max(0.0)
    };
    if x < 0.0 {
        2.0 - result
    } else {
        result
    }
}

pub fn normal_cdf(z: Scalar) -> Scalar {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(z: Scalar) -> Scalar {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Inverse standard normal CDF: Acklam's rational approximation refined
/// by two Halley steps against `normal_cdf`. The upper tail goes through
/// the lower-tail path by symmetry, where `erfc` stays relatively
/// accurate.
#[allow(clippy::excessive_precision)]
pub fn normal_quantile(p: Scalar) -> Scalar {
    assert!(p > 0.0 && p < 1.0, "quantile needs p in (0,1)");
    if p > 0.5 {
        return -normal_quantile_lower(1.0 - p);
    }
    normal_quantile_lower(p)
}

#[allow(clippy::excessive_precision)]
fn normal_quantile_lower(p: Scalar) -> Scalar {
    const A: [Scalar; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.383577518672690e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [Scalar; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [Scalar; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [Scalar; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    debug_assert!(p <= 0.5 + 1e-12);
    let p_low = 0.02425;
    let mut x = if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e / normal_pdf(x);
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// Truncated normal with pre-truncation location/scale on [lo, hi],
/// sampled by inverse CDF.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedNormal {
    pub location: Scalar,
    pub scale: Scalar,
    pub lo: Scalar,
    pub hi: Scalar,
    cdf_lo: Scalar,
    cdf_width: Scalar,
}

impl TruncatedNormal {
    pub fn new(location: Scalar, scale: Scalar, lo: Scalar, hi: Scalar) -> Result<Self> {
        if scale <= 0.0 || !(hi > lo) {
            return Err(HcbError::InvalidParameter("bad truncation parameters".into()));
        }
        if scale >= hi - lo {
            return Err(HcbError::DegenerateTruncation { sigma: scale, width: hi - lo });
        }
        let a = normal_cdf((lo - location) / scale);
        let b = normal_cdf((hi - location) / scale);
        Ok(Self { location, scale, lo, hi, cdf_lo: a, cdf_width: b - a })
    }

    pub fn inverse_cdf(&self, u: Scalar) -> Scalar {
        let p = (self.cdf_lo + u * self.cdf_width).clamp(1e-300, 1.0 - 1e-16);
        (self.location + self.scale * normal_quantile(p)).clamp(self.lo, self.hi)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Scalar {
        self.inverse_cdf(rng.gen::<Scalar>())
    }

    /// Normalized density at x.
    pub fn pdf(&self, x: Scalar) -> Scalar {
        if x < self.lo || x > self.hi {
            return 0.0;
        }
        normal_pdf((x - self.location) / self.scale) / (self.scale * self.cdf_width)
    }

    /// Expectation of f under the truncated density by composite Simpson
    /// quadrature with `nodes` panels.
    pub fn expect(&self, nodes: usize, f: impl Fn(Scalar) -> Scalar) -> Scalar {
        let n = if nodes % 2 == 0 { nodes } else { nodes + 1 };
        let h = (self.hi - self.lo) / n as Scalar;
        let g = |x: Scalar| f(x) * self.pdf(x);
        let mut acc = g(self.lo) + g(self.hi);
        for i in 1..n {
            let x = self.lo + h * i as Scalar;
            acc += g(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        acc * h / 3.0
    }
}

// --- Scenario specification ----------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    NonAdversarial,
    Adversarial,
}

/// Simulation losses: the three margin surrogates of the non-adversarial
/// scenario and the three supremum-based surrogates of the adversarial
/// one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimLoss {
    Quadratic,
    Logistic,
    Exponential,
    SupRho,
    SupHinge,
    SupSigmoid,
}

impl SimLoss {
    pub fn name(&self) -> &'static str {
        match self {
            SimLoss::Quadratic => "quadratic",
            SimLoss::Logistic => "logistic",
            SimLoss::Exponential => "exponential",
            SimLoss::SupRho => "sup-rho",
            SimLoss::SupHinge => "sup-hinge",
            SimLoss::SupSigmoid => "sup-sigmoid",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "quadratic" | "quad" => SimLoss::Quadratic,
            "logistic" | "log" => SimLoss::Logistic,
            "exponential" | "exp" => SimLoss::Exponential,
            "sup-rho" | "rho" => SimLoss::SupRho,
            "sup-hinge" => SimLoss::SupHinge,
            "sup-sigmoid" => SimLoss::SupSigmoid,
            other => {
                return Err(HcbError::InvalidParameter(format!("unknown loss `{other}`")))
            }
        })
    }

    pub fn is_adversarial(&self) -> bool {
        matches!(self, SimLoss::SupRho | SimLoss::SupHinge | SimLoss::SupSigmoid)
    }

    fn phi(&self) -> AuxiliaryFunction {
        match self {
            SimLoss::Quadratic => AuxiliaryFunction::quadratic(),
            SimLoss::Logistic => AuxiliaryFunction::logistic2(),
            SimLoss::Exponential => AuxiliaryFunction::exponential(),
            SimLoss::SupRho => AuxiliaryFunction::rho_margin(1.0),
            SimLoss::SupHinge => AuxiliaryFunction::hinge(),
            SimLoss::SupSigmoid => AuxiliaryFunction::sigmoid(1.0),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimulationSpec {
    pub scenario: Scenario,
    pub sigma: Scalar,
    /// Perturbation radius for the adversarial scenario.
    pub gamma: Scalar,
    pub sample_count: u64,
    pub seed: u64,
    pub shards: u64,
    /// Linear hypothesis h(x) = a x + b.
    pub hypothesis: (Scalar, Scalar),
    pub losses: Vec<SimLoss>,
}

impl SimulationSpec {
    pub fn non_adversarial(sigma: Scalar) -> Self {
        Self {
            scenario: Scenario::NonAdversarial,
            sigma,
            gamma: 0.1,
            sample_count: 1_000_000,
            seed: 12_345,
            shards: 16,
            hypothesis: (-5.0, 0.0),
            losses: vec![SimLoss::Quadratic, SimLoss::Logistic, SimLoss::Exponential],
        }
    }

    pub fn adversarial(sigma: Scalar) -> Self {
        Self {
            scenario: Scenario::Adversarial,
            sigma,
            gamma: 0.1,
            sample_count: 1_000_000,
            seed: 12_345,
            shards: 16,
            hypothesis: (-5.0, 0.0),
            losses: vec![SimLoss::SupRho, SimLoss::SupHinge, SimLoss::SupSigmoid],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sigma <= 0.0 {
            return Err(HcbError::InvalidParameter("sigma must be positive".into()));
        }
        if self.sample_count < 10_000 {
            return Err(HcbError::InvalidParameter("need at least 1e4 samples".into()));
        }
        if self.shards == 0 {
            return Err(HcbError::InvalidParameter("need at least one shard".into()));
        }
        for loss in &self.losses {
            let adv = matches!(self.scenario, Scenario::Adversarial);
            if loss.is_adversarial() != adv {
                return Err(HcbError::UnsupportedConfiguration(format!(
                    "loss {} does not belong to scenario {:?}",
                    loss.name(),
                    self.scenario
                )));
            }
        }
        self.component()?;
        Ok(())
    }

    /// The truncated-normal component of the scenario.
    fn component(&self) -> Result<TruncatedNormal> {
        match self.scenario {
            Scenario::NonAdversarial => {
                TruncatedNormal::new(self.sigma, self.sigma, self.sigma, 1.0)
            }
            Scenario::Adversarial => TruncatedNormal::new(
                self.gamma - self.sigma,
                self.sigma,
                -1.0,
                self.gamma - self.sigma,
            ),
        }
    }
}

/// One labeled draw.
#[derive(Clone, Copy, Debug)]
pub struct Sample {
    pub x: Scalar,
    pub y: i8,
}

/// Stream of i.i.d. draws from the scenario mixture.
pub struct SampleStream {
    spec: SimulationSpec,
    component: TruncatedNormal,
    rng: ChaCha8Rng,
}

impl SampleStream {
    pub fn new(spec: &SimulationSpec, shard: u64) -> Result<Self> {
        spec.validate()?;
        let component = spec.component()?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(shard);
        Ok(Self { spec: spec.clone(), component, rng })
    }

    pub fn draw(&mut self) -> Sample {
        let u: Scalar = self.rng.gen();
        match self.spec.scenario {
            Scenario::NonAdversarial => {
                // 1/16 atom (1, -1); 7/16 positive cloud; mirrored with
                // labels flipped.
                if u < 1.0 / 16.0 {
                    Sample { x: 1.0, y: -1 }
                } else if u < 8.0 / 16.0 {
                    Sample { x: self.component.sample(&mut self.rng), y: 1 }
                } else if u < 9.0 / 16.0 {
                    Sample { x: -1.0, y: 1 }
                } else {
                    Sample { x: -self.component.sample(&mut self.rng), y: -1 }
                }
            }
            Scenario::Adversarial => {
                if u < 1.0 / 16.0 {
                    Sample { x: 1.0, y: -1 }
                } else if u < 2.0 / 16.0 {
                    Sample { x: -1.0, y: 1 }
                } else {
                    Sample { x: self.component.sample(&mut self.rng), y: -1 }
                }
            }
        }
    }
}

/// Loss evaluation against the fixed 1-D linear hypothesis.
fn surrogate_value(loss: SimLoss, spec: &SimulationSpec, s: Sample) -> Scalar {
    let (a, b) = spec.hypothesis;
    let score = a * s.x + b;
    let phi = loss.phi();
    if loss.is_adversarial() {
        let spread = spec.gamma * a.abs();
        if s.y >= 0 {
            phi.value(score - spread)
        } else {
            phi.value(-(score + spread))
        }
    } else {
        phi.value((s.y as Scalar) * score)
    }
}

fn target_value(spec: &SimulationSpec, s: Sample) -> Scalar {
    let (a, b) = spec.hypothesis;
    let score = a * s.x + b;
    match spec.scenario {
        Scenario::NonAdversarial => {
            let sign = if score >= 0.0 { 1 } else { -1 };
            if sign != s.y as i32 {
                1.0
            } else {
                0.0
            }
        }
        Scenario::Adversarial => {
            let spread = spec.gamma * a.abs();
            let err =
                if s.y >= 0 { score - spread <= 0.0 } else { score + spread >= 0.0 };
            if err {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Per-loss Monte-Carlo estimates.
#[derive(Clone, Debug)]
pub struct LossEstimate {
    pub loss: SimLoss,
    pub risk_target: Scalar,
    pub se_target: Scalar,
    pub risk_surrogate: Scalar,
    pub se_surrogate: Scalar,
    pub slack: Scalar,
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub sigma: Scalar,
    pub estimates: Vec<LossEstimate>,
}

#[derive(Clone, Copy, Debug, Default)]
struct Moments {
    sum: Kahan,
    sum_sq: Kahan,
}

impl Moments {
    fn add(&mut self, v: Scalar) {
        self.sum.add(v);
        self.sum_sq.add(v * v);
    }

    fn merge(&mut self, other: &Moments) {
        self.sum.merge(&other.sum);
        self.sum_sq.merge(&other.sum_sq);
    }

    fn mean_se(&self, count: u64) -> (Scalar, Scalar) {
        let n = count as Scalar;
        let mean = self.sum.total() / n;
        let var = (self.sum_sq.total() / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

fn shard_worker(spec: &SimulationSpec, shard: u64, count: u64) -> Result<(Moments, Vec<Moments>)> {
    let mut stream = SampleStream::new(spec, shard)?;
    let mut target = Moments::default();
    let mut per_loss = vec![Moments::default(); spec.losses.len()];
    for _ in 0..count {
        let s = stream.draw();
        target.add(target_value(spec, s));
        for (k, &loss) in spec.losses.iter().enumerate() {
            per_loss[k].add(surrogate_value(loss, spec, s));
        }
    }
    Ok((target, per_loss))
}

fn thread_budget() -> usize {
    std::env::var("HCONSIST_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&v| v >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
        })
}

/// Monte-Carlo risk estimation. Shard results are reduced in fixed shard
/// order, so identical (spec, seed, shards) produce identical output
/// regardless of the thread schedule.
pub fn estimate_risks(spec: &SimulationSpec) -> Result<SimResult> {
    spec.validate()?;
    let shards = spec.shards;
    let base = spec.sample_count / shards;
    let remainder = spec.sample_count % shards;
    let counts: Vec<u64> =
        (0..shards).map(|s| base + if s < remainder { 1 } else { 0 }).collect();

    let workers = thread_budget().min(shards as usize).max(1);
    let mut shard_results: Vec<Option<(Moments, Vec<Moments>)>> =
        (0..shards).map(|_| None).collect();
    std::thread::scope(|scope| -> Result<()> {
        let chunks: Vec<Vec<u64>> = (0..workers)
            .map(|w| (0..shards).filter(|s| (*s as usize) % workers == w).collect())
            .collect();
        let mut handles = Vec::new();
        for chunk in chunks {
            let spec_ref = &*spec;
            let counts_ref = &counts;
            handles.push(scope.spawn(move || -> Result<Vec<(u64, (Moments, Vec<Moments>))>> {
                let mut out = Vec::with_capacity(chunk.len());
                for shard in chunk {
                    out.push((shard, shard_worker(spec_ref, shard, counts_ref[shard as usize])?));
                }
                Ok(out)
            }));
        }
        for handle in handles {
            for (shard, result) in handle.join().expect("shard worker panicked")? {
                shard_results[shard as usize] = Some(result);
            }
        }
        Ok(())
    })?;

    let mut target = Moments::default();
    let mut per_loss = vec![Moments::default(); spec.losses.len()];
    for result in shard_results.into_iter().flatten() {
        target.merge(&result.0);
        for (k, m) in result.1.iter().enumerate() {
            per_loss[k].merge(m);
        }
    }

    let (rt, set) = target.mean_se(spec.sample_count);
    let estimates = spec
        .losses
        .iter()
        .zip(per_loss)
        .map(|(&loss, m)| {
            let (rs, ses) = m.mean_se(spec.sample_count);
            LossEstimate {
                loss,
                risk_target: rt,
                se_target: set,
                risk_surrogate: rs,
                se_surrogate: ses,
                slack: rs - rt,
            }
        })
        .collect();
    Ok(SimResult { sigma: spec.sigma, estimates })
}

/// Per-sigma Monte-Carlo sweep.
pub fn sweep_sigma(spec: &SimulationSpec, sigmas: &[Scalar]) -> Result<Vec<SimResult>> {
    let mut out = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let mut s = spec.clone();
        s.sigma = sigma;
        out.push(estimate_risks(&s)?);
    }
    Ok(out)
}

/// Finite-support discretization of the scenario mixture: atoms kept
/// exactly, each truncated-normal component binned by midpoint cells.
/// Labels are deterministic per support point, so every conditional is
/// one-hot.
pub fn discretize_mixture(spec: &SimulationSpec, cells: usize) -> Result<DiscreteDistribution> {
    use crate::dist::ConditionalPoint;
    spec.validate()?;
    let component = spec.component()?;
    let mut rows: Vec<(Scalar, ConditionalPoint)> = Vec::new();
    let push = |rows: &mut Vec<(Scalar, ConditionalPoint)>, w: Scalar, x: Scalar, y: i8| {
        if w <= 0.0 {
            return;
        }
        let probs = if y > 0 { vec![1.0, 0.0] } else { vec![0.0, 1.0] };
        let id = rows.len();
        let point = ConditionalPoint::new(id, x.abs(), probs)
            .expect("one-hot conditional")
            .with_coord(x);
        rows.push((w, point));
    };
    let h = (component.hi - component.lo) / cells as Scalar;
    match spec.scenario {
        Scenario::NonAdversarial => {
            push(&mut rows, 1.0 / 16.0, 1.0, -1);
            push(&mut rows, 1.0 / 16.0, -1.0, 1);
            for i in 0..cells {
                let x = component.lo + h * (i as Scalar + 0.5);
                let w = component.pdf(x) * h;
                push(&mut rows, 7.0 / 16.0 * w, x, 1);
                push(&mut rows, 7.0 / 16.0 * w, -x, -1);
            }
        }
        Scenario::Adversarial => {
            push(&mut rows, 1.0 / 16.0, 1.0, -1);
            push(&mut rows, 1.0 / 16.0, -1.0, 1);
            for i in 0..cells {
                let x = component.lo + h * (i as Scalar + 0.5);
                let w = component.pdf(x) * h;
                push(&mut rows, 7.0 / 8.0 * w, x, -1);
            }
        }
    }
    // Midpoint binning leaves O(h^2) mass unaccounted; renormalize.
    let total: Scalar = rows.iter().map(|(w, _)| *w).sum();
    for (w, _) in rows.iter_mut() {
        *w /= total;
    }
    DiscreteDistribution::new(rows)
}

/// Population risks by quadrature over the mixture density; the
/// deterministic oracle the Monte-Carlo path is checked against.
#[derive(Clone, Debug)]
pub struct PopulationRisks {
    pub risk_target: Scalar,
    pub per_loss: Vec<(SimLoss, Scalar)>,
}

pub fn population_risks(spec: &SimulationSpec, nodes: usize) -> Result<PopulationRisks> {
    spec.validate()?;
    let component = spec.component()?;
    let term = |s: Sample| -> Vec<Scalar> {
        let mut row = vec![target_value(spec, s)];
        row.extend(spec.losses.iter().map(|&l| surrogate_value(l, spec, s)));
        row
    };
    let k = spec.losses.len() + 1;
    let mut acc = vec![0.0; k];
    match spec.scenario {
        Scenario::NonAdversarial => {
            let atoms = [(1.0 / 16.0, Sample { x: 1.0, y: -1 }), (1.0 / 16.0, Sample { x: -1.0, y: 1 })];
            for (w, s) in atoms {
                for (i, v) in term(s).into_iter().enumerate() {
                    acc[i] += w * v;
                }
            }
            for i in 0..k {
                let f = |x: Scalar| term(Sample { x, y: 1 })[i];
                acc[i] += 7.0 / 16.0 * component.expect(nodes, f);
                let g = |x: Scalar| term(Sample { x: -x, y: -1 })[i];
                acc[i] += 7.0 / 16.0 * component.expect(nodes, g);
            }
        }
        Scenario::Adversarial => {
            let atoms = [(1.0 / 16.0, Sample { x: 1.0, y: -1 }), (1.0 / 16.0, Sample { x: -1.0, y: 1 })];
            for (w, s) in atoms {
                for (i, v) in term(s).into_iter().enumerate() {
                    acc[i] += w * v;
                }
            }
            for i in 0..k {
                let f = |x: Scalar| term(Sample { x, y: -1 })[i];
                acc[i] += 7.0 / 8.0 * component.expect(nodes, f);
            }
        }
    }
    Ok(PopulationRisks {
        risk_target: acc[0],
        per_loss: spec.losses.iter().copied().zip(acc[1..].to_vec()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_inverts_cdf() {
        for i in 1..200 {
            let z = -6.0 + 12.0 * (i as f64) / 200.0;
            let p = normal_cdf(z);
            if p <= 1e-12 || p >= 1.0 - 1e-12 {
                continue;
            }
            let q = normal_quantile(p);
            // Round-tripping through p is representation-limited in the
            // upper tail, where 1 - p has few significant bits.
            let tol = if z.abs() <= 4.0 { 1e-9 } else { 1e-8 };
            assert!((q - z).abs() < tol, "z = {z}, q = {q}");
        }
    }

    #[test]
    fn truncated_normal_bounds_and_mean() {
        let tn = TruncatedNormal::new(0.1, 0.1, 0.1, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut acc = 0.0;
        let n = 40_000;
        for _ in 0..n {
            let x = tn.sample(&mut rng);
            assert!((0.1..=1.0).contains(&x));
            acc += x;
        }
        let mean_mc = acc / n as f64;
        // Lower-truncation at the location: mean = loc + scale*sqrt(2/pi).
        let mean_exact = 0.1 + 0.1 * (2.0 / std::f64::consts::PI).sqrt();
        assert!((mean_mc - mean_exact).abs() < 2e-3);
        let mean_quad = tn.expect(20_001, |x| x);
        assert!((mean_quad - mean_exact).abs() < 1e-9);
        // Density integrates to one.
        assert!((tn.expect(20_001, |_| 1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_truncation_is_refused() {
        assert!(matches!(
            TruncatedNormal::new(0.6, 0.6, 0.6, 1.0),
            Err(HcbError::DegenerateTruncation { .. })
        ));
        let mut spec = SimulationSpec::non_adversarial(0.6);
        assert!(spec.validate().is_err());
        spec.sigma = 0.3;
        assert!(spec.validate().is_ok());
    }

    #[test]
    fn component_masses_match_spec() {
        let mut spec = SimulationSpec::non_adversarial(0.1);
        spec.sample_count = 200_000;
        let mut stream = SampleStream::new(&spec, 0).unwrap();
        let mut atom_pos = 0u64;
        for _ in 0..spec.sample_count {
            let s = stream.draw();
            if s.x == 1.0 && s.y == -1 {
                atom_pos += 1;
            }
        }
        let freq = atom_pos as f64 / spec.sample_count as f64;
        let se = (freq * (1.0 - freq) / spec.sample_count as f64).sqrt();
        assert!((freq - 1.0 / 16.0).abs() < 3.0 * se + 1e-4);

        let mut adv = SimulationSpec::adversarial(0.05);
        adv.sample_count = 200_000;
        let mut stream = SampleStream::new(&adv, 0).unwrap();
        let mut atom_neg = 0u64;
        for _ in 0..adv.sample_count {
            let s = stream.draw();
            if s.x == -1.0 {
                atom_neg += 1;
            }
        }
        let freq = atom_neg as f64 / adv.sample_count as f64;
        let se = (freq * (1.0 - freq) / adv.sample_count as f64).sqrt();
        assert!((freq - 1.0 / 16.0).abs() < 3.0 * se + 1e-4);
    }

    #[test]
    fn estimates_are_bit_reproducible() {
        let mut spec = SimulationSpec::non_adversarial(0.1);
        spec.sample_count = 50_000;
        spec.shards = 8;
        let a = estimate_risks(&spec).unwrap();
        let b = estimate_risks(&spec).unwrap();
        for (ea, eb) in a.estimates.iter().zip(&b.estimates) {
            assert_eq!(ea.risk_surrogate.to_bits(), eb.risk_surrogate.to_bits());
            assert_eq!(ea.risk_target.to_bits(), eb.risk_target.to_bits());
        }
    }

    #[test]
    fn mc_agrees_with_quadrature() {
        for spec in [
            {
                let mut s = SimulationSpec::non_adversarial(0.1);
                s.sample_count = 200_000;
                s
            },
            {
                let mut s = SimulationSpec::adversarial(0.03);
                s.sample_count = 200_000;
                s
            },
        ] {
            let mc = estimate_risks(&spec).unwrap();
            let quad = population_risks(&spec, 50_000).unwrap();
            for (est, (loss, pop)) in mc.estimates.iter().zip(&quad.per_loss) {
                assert_eq!(est.loss, *loss);
                assert!(
                    (est.risk_surrogate - pop).abs() <= 4.0 * est.se_surrogate + 1e-9,
                    "{}: mc {} vs quad {} (se {})",
                    loss.name(),
                    est.risk_surrogate,
                    pop,
                    est.se_surrogate
                );
            }
            assert!(
                (mc.estimates[0].risk_target - quad.risk_target).abs()
                    <= 4.0 * mc.estimates[0].se_target + 1e-9
            );
        }
    }

    #[test]
    fn population_bound_holds_per_sigma() {
        for sigma in [0.3, 0.1, 0.03] {
            let quad = population_risks(&SimulationSpec::non_adversarial(sigma), 20_000).unwrap();
            for (loss, risk) in &quad.per_loss {
                assert!(
                    *risk >= quad.risk_target - 1e-10,
                    "{} at sigma {sigma}: {} < {}",
                    loss.name(),
                    risk,
                    quad.risk_target
                );
            }
            let quad = population_risks(&SimulationSpec::adversarial(sigma), 20_000).unwrap();
            for (loss, risk) in &quad.per_loss {
                assert!(*risk >= quad.risk_target - 1e-10, "{} adversarial", loss.name());
            }
        }
    }

    #[test]
    fn seed_change_stays_in_envelope() {
        let mut spec = SimulationSpec::non_adversarial(0.1);
        spec.sample_count = 100_000;
        let a = estimate_risks(&spec).unwrap();
        spec.seed = 999;
        let b = estimate_risks(&spec).unwrap();
        for (ea, eb) in a.estimates.iter().zip(&b.estimates) {
            let tol = 6.0 * (ea.se_surrogate + ea.se_target + eb.se_surrogate + eb.se_target);
            assert!((ea.slack - eb.slack).abs() <= tol);
        }
    }
}
