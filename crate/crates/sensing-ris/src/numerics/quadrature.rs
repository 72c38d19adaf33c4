//! Adaptive Gauss-Kronrod quadrature on the positive half line.
//!
//! A 7-15 point Gauss-Kronrod rule drives a worst-interval-first bisection
//! queue. The semi-infinite range is truncated where the integrand envelope
//! falls below a configured fraction of its peak; the integrands this crate
//! integrates are smooth, nonnegative and single-peaked, which the peak scan
//! relies on.

use super::NumericsError;
use std::collections::BinaryHeap;

/// Evaluation policy for [`integrate_positive_halfline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Fraction of the integrand peak below which the tail is dropped.
    pub trunc_threshold: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            trunc_threshold: 1e-16,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), NumericsError> {
        for (what, v) in [
            ("absolute tolerance", self.abs_tol),
            ("relative tolerance", self.rel_tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(NumericsError::Domain {
                    what,
                    requirement: "finite and positive",
                    value: v,
                });
            }
        }
        if !(self.trunc_threshold > 0.0 && self.trunc_threshold < 1.0) {
            return Err(NumericsError::Domain {
                what: "truncation threshold",
                requirement: "inside (0, 1)",
                value: self.trunc_threshold,
            });
        }
        Ok(())
    }
}

// Abscissae of the 15-point Kronrod rule on [-1, 1]; entries at odd index
// (plus the final center node) form the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// One Gauss-Kronrod 7-15 evaluation; returns (integral, error estimate).
fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let hlgth = 0.5 * (b - a);
    let centr = 0.5 * (a + b);

    let fc = f(centr);
    let mut resg = WG[3] * fc;
    let mut resk = WGK[7] * fc;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0f64; 7];
    let mut fv2 = [0.0f64; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = f(centr - absc);
        let f2 = f(centr + absc);
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (f1.abs() + f2.abs());
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }

    let result = resk * hlgth;
    resabs *= hlgth.abs();
    resasc *= hlgth.abs();
    let mut abserr = ((resk - resg) * hlgth).abs();
    if resasc != 0.0 && abserr != 0.0 {
        abserr = resasc * 1.0f64.min((200.0 * abserr / resasc).powf(1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        abserr = abserr.max(50.0 * f64::EPSILON * resabs);
    }
    (result, abserr)
}

#[derive(Debug)]
struct Panel {
    err: f64,
    a: f64,
    b: f64,
    val: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err) == std::cmp::Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Coarse log-grid argmax of |f| followed by two linear refinements.
fn scan_peak<F: Fn(f64) -> f64>(f: &F) -> (f64, f64) {
    let mut ts = Vec::with_capacity(162);
    ts.push(0.0f64);
    for i in 0..=160 {
        ts.push(10f64.powf(-4.0 + 8.0 * i as f64 / 160.0));
    }
    let mut bi = 0usize;
    let mut bv = f(ts[0]).abs();
    for (i, &t) in ts.iter().enumerate().skip(1) {
        let v = f(t).abs();
        if v > bv {
            bv = v;
            bi = i;
        }
    }
    let mut bt = ts[bi];
    let mut lo = if bi == 0 { 0.0 } else { ts[bi - 1] };
    let mut hi = if bi + 1 < ts.len() {
        ts[bi + 1]
    } else {
        ts[bi] * 1.2
    };
    for _ in 0..2 {
        let n = 40;
        for k in 0..=n {
            let t = lo + (hi - lo) * k as f64 / n as f64;
            let v = f(t).abs();
            if v > bv {
                bv = v;
                bt = t;
            }
        }
        let span = (hi - lo) / n as f64;
        lo = (bt - span).max(0.0);
        hi = bt + span;
    }
    (bt, bv)
}

const MAX_PANELS: usize = 2000;

/// Integrate f over [0, inf) by truncating where the envelope falls below
/// `trunc_threshold` times the peak, then refining adaptively until the
/// accumulated Kronrod error estimate meets the requested tolerance.
pub fn integrate_positive_halfline<F>(f: F, spec: &QuadratureSpec) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    let (t_peak, peak) = scan_peak(&f);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let cap = spec.trunc_threshold * peak;
    let mut t_max = (2.0 * t_peak).max(1.0);
    let mut grow = 0;
    while f(t_max).abs() > cap {
        t_max *= 2.0;
        grow += 1;
        if grow > 200 {
            return Err(NumericsError::NoDecay);
        }
    }

    let mut breaks = vec![0.0, 0.5 * t_peak, t_peak, 2.0 * t_peak, t_max];
    breaks.retain(|t| t.is_finite() && *t <= t_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let mut heap = BinaryHeap::with_capacity(64);
    let mut done: Vec<Panel> = Vec::new();
    let mut result = 0.0;
    let mut err_sum = 0.0;
    for win in breaks.windows(2) {
        if win[1] > win[0] {
            let (v, e) = qk15(&f, win[0], win[1]);
            result += v;
            err_sum += e;
            heap.push(Panel {
                err: e,
                a: win[0],
                b: win[1],
                val: v,
            });
        }
    }

    let mut panels = heap.len();
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * result.abs());
        if err_sum.max(0.0) <= tol {
            let mut all: Vec<Panel> = heap.into_vec();
            all.append(&mut done);
            all.sort_by(|p, q| p.a.total_cmp(&q.a));
            return Ok(all.iter().map(|p| p.val).sum());
        }
        if panels >= MAX_PANELS {
            return Err(NumericsError::Quadrature {
                achieved: err_sum,
                requested: tol,
            });
        }
        let Some(worst) = heap.pop() else {
            return Err(NumericsError::Quadrature {
                achieved: err_sum,
                requested: tol,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // interval at floating-point resolution; its error is irreducible
            done.push(worst);
            continue;
        }
        let (v1, e1) = qk15(&f, worst.a, mid);
        let (v2, e2) = qk15(&f, mid, worst.b);
        result += v1 + v2 - worst.val;
        err_sum += e1 + e2 - worst.err;
        heap.push(Panel {
            err: e1,
            a: worst.a,
            b: mid,
            val: v1,
        });
        heap.push(Panel {
            err: e2,
            a: mid,
            b: worst.b,
            val: v2,
        });
        panels += 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_moments() {
        let spec = QuadratureSpec::default();
        let m0 = integrate_positive_halfline(|t| (-t).exp(), &spec).unwrap();
        assert_relative_eq!(m0, 1.0, max_relative = 1e-10);
        let m1 = integrate_positive_halfline(|t| t * (-t).exp(), &spec).unwrap();
        assert_relative_eq!(m1, 1.0, max_relative = 1e-10);
        let m2 = integrate_positive_halfline(|t| t * t * (-t).exp(), &spec).unwrap();
        assert_relative_eq!(m2, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn narrow_gaussian_spike() {
        // integral of exp(-1e4 (t-3)^2) dt = sqrt(pi)/100
        let spec = QuadratureSpec::default();
        let v = integrate_positive_halfline(|t| (-1e4 * (t - 3.0) * (t - 3.0)).exp(), &spec)
            .unwrap();
        assert_relative_eq!(v, 1.7724538509055160273e-2, max_relative = 1e-9);
    }

    #[test]
    fn zero_integrand() {
        let spec = QuadratureSpec::default();
        assert_eq!(integrate_positive_halfline(|_| 0.0, &spec).unwrap(), 0.0);
    }

    #[test]
    fn unreachable_tolerance_reports_achieved_error() {
        let spec = QuadratureSpec {
            abs_tol: 1e-300,
            rel_tol: 1e-300,
            trunc_threshold: 1e-16,
        };
        match integrate_positive_halfline(|t| (-t).exp(), &spec) {
            Err(NumericsError::Quadrature { achieved, .. }) => {
                assert!(achieved > 0.0 && achieved < 1e-10)
            }
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }

    #[test]
    fn non_decaying_integrand_rejected() {
        let spec = QuadratureSpec::default();
        assert!(matches!(
            integrate_positive_halfline(|_| 1.0, &spec),
            Err(NumericsError::NoDecay)
        ));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        }
        .validate()
        .is_err());
        assert!(QuadratureSpec {
            trunc_threshold: 1.5,
            ..QuadratureSpec::default()
        }
        .validate()
        .is_err());
        assert!(QuadratureSpec::default().validate().is_ok());
    }
}
