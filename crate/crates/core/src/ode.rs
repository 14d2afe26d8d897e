//! Dormand–Prince 5(4) integrator with step clipping at requested output
//! times and location of a single terminal event.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controls {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Controls {
    fn default() -> Self {
        Controls {
            rtol: 1e-12,
            atol: 1e-14,
            h_init: 1e-2,
            h_max: 0.5,
            max_steps: 2_000_000,
        }
    }
}

/// Result of one call to [`Dopri5::integrate`].
#[derive(Debug, Clone)]
pub struct Outcome<const N: usize> {
    /// Where integration stopped: `t_end`, or the event time.
    pub t: f64,
    pub y: [f64; N],
    /// States at the requested output times that were reached, in order.
    pub samples: Vec<[f64; N]>,
    /// Set when the event function crossed from positive to non-positive.
    pub event: bool,
    pub steps: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

pub struct Dopri5<F, const N: usize> {
    rhs: F,
    controls: Controls,
}

struct Step<const N: usize> {
    y: [f64; N],
    k7: [f64; N],
    err: f64,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl<F, const N: usize> Dopri5<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, controls: Controls) -> Self {
        Dopri5 { rhs, controls }
    }

    fn step(&self, t: f64, y: &[f64; N], k1: &[f64; N], h: f64) -> Step<N> {
        let f = &self.rhs;
        let k2 = f(t + C2 * h, &axpy(y, h, &[(A21, k1)]));
        let k3 = f(t + C3 * h, &axpy(y, h, &[(A31, k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &axpy(y, h, &[(A41, k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &axpy(y, h, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &axpy(y, h, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y_new = axpy(y, h, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = f(t + h, &y_new);
        let c = &self.controls;
        let mut sq = 0.0;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = c.atol + c.rtol * y[i].abs().max(y_new[i].abs());
            sq += (e / sc) * (e / sc);
        }
        let err = (sq / N as f64).sqrt();
        Step { y: y_new, k7, err }
    }

    /// Integrates from `t0` towards `t_end` (either direction is not
    /// supported: `t_end > t0`). Steps are clipped to land exactly on each
    /// of `outputs` (ascending, inside `[t0, t_end]`). When `event` is given,
    /// integration stops at the first point where it changes sign from
    /// positive to non-positive.
    pub fn integrate(
        &self,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        outputs: &[f64],
        event: Option<&dyn Fn(&[f64; N]) -> f64>,
    ) -> Result<Outcome<N>> {
        let c = self.controls;
        let mut t = t0;
        let mut y = y0;
        let mut k1 = (self.rhs)(t, &y);
        let mut h = c.h_init.min(c.h_max).min(t_end - t0);
        let mut samples = Vec::with_capacity(outputs.len());
        let mut next_out = outputs.partition_point(|&o| o < t0);
        for _ in outputs.iter().take(next_out).filter(|&&o| o == t0) {
            samples.push(y);
        }
        let mut steps = 0usize;
        let mut g_prev = event.map(|g| g(&y));
        let mut reject_streak = false;

        while t < t_end {
            if steps >= c.max_steps {
                return Err(Error::Stiffness { t, h });
            }
            let target = outputs.get(next_out).copied().unwrap_or(t_end).min(t_end);
            let mut h_try = h.min(target - t);
            let clipped = h_try >= target - t;
            if clipped {
                h_try = target - t;
            }
            let st = self.step(t, &y, &k1, h_try);
            steps += 1;
            if !st.err.is_finite() || st.err > 1.0 {
                let fac = if st.err.is_finite() {
                    (0.9 * st.err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = h_try * fac;
                reject_streak = true;
                if h < 16.0 * f64::EPSILON * t.abs().max(1.0) {
                    return Err(Error::Stiffness { t, h });
                }
                continue;
            }
            let t_new = if clipped { target } else { t + h_try };

            if let (Some(g), Some(gp)) = (event, g_prev) {
                let g_new = g(&st.y);
                if gp > 0.0 && g_new <= 0.0 {
                    let (te, ye) = self.locate(t, &y, &k1, h_try, gp, g_new, g);
                    return Ok(Outcome {
                        t: te,
                        y: ye,
                        samples,
                        event: true,
                        steps,
                    });
                }
                g_prev = Some(g_new);
            }

            t = t_new;
            y = st.y;
            k1 = st.k7;
            while next_out < outputs.len() && outputs[next_out] <= t {
                samples.push(y);
                next_out += 1;
            }
            let mut fac = (0.9 * st.err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
            if reject_streak {
                fac = fac.min(1.0);
                reject_streak = false;
            }
            // a clipped step says nothing about the natural step size
            let base = if clipped { h.max(h_try) } else { h_try };
            h = (base * fac).min(c.h_max);
        }
        Ok(Outcome {
            t,
            y,
            samples,
            event: false,
            steps,
        })
    }

    /// Illinois iteration on the step length from `(t, y)`; each trial is a
    /// single fresh step, so the located state carries step-level accuracy.
    #[allow(clippy::too_many_arguments)]
    fn locate(
        &self,
        t: f64,
        y: &[f64; N],
        k1: &[f64; N],
        h: f64,
        g0: f64,
        g1: f64,
        g: &dyn Fn(&[f64; N]) -> f64,
    ) -> (f64, [f64; N]) {
        let (mut a, mut fa) = (0.0, g0);
        let (mut b, mut fb) = (h, g1);
        let mut best = (h, self.step(t, y, k1, h).y);
        let mut side = 0i8;
        for _ in 0..100 {
            let m = if fb != fa {
                (a * fb - b * fa) / (fb - fa)
            } else {
                0.5 * (a + b)
            };
            let m = if m <= a || m >= b { 0.5 * (a + b) } else { m };
            let ym = self.step(t, y, k1, m).y;
            let fm = g(&ym);
            best = (m, ym);
            if fm == 0.0 || (b - a) <= 4.0 * f64::EPSILON * (t.abs() + h) {
                break;
            }
            if fm > 0.0 {
                a = m;
                fa = fm;
                if side == 1 {
                    fb *= 0.5;
                }
                side = 1;
            } else {
                b = m;
                fb = fm;
                if side == -1 {
                    fa *= 0.5;
                }
                side = -1;
            }
            if fm.abs() <= 1e-15 * g0.abs().max(g1.abs()) {
                break;
            }
        }
        (t + best.0, best.1)
    }
}
