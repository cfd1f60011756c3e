//! Fixed-step classical Runge-Kutta integration of autonomous systems.

use std::ops::ControlFlow;

use crate::{Error, Result};

/// Autonomous ODE `ẏ = f(y)` with a fixed step and end time.
#[derive(Clone, Debug)]
pub struct OdeSpec<F> {
    pub dimension: usize,
    pub rhs: F,
    pub step: f64,
    pub t_end: f64,
}

impl<F> OdeSpec<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    pub fn new(dimension: usize, rhs: F, step: f64, t_end: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidParams("ODE dimension must be positive".into()));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParams(format!("step must be positive, got {step}")));
        }
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidParams(format!("t_end must be positive, got {t_end}")));
        }
        Ok(Self {
            dimension,
            rhs,
            step,
            t_end,
        })
    }

    /// Number of steps needed to reach `t_end`; the last one may be shorter.
    pub fn num_steps(&self) -> usize {
        let full = (self.t_end / self.step).floor();
        let rem = self.t_end - full * self.step;
        // Treat a remainder at rounding level as an exact fit.
        if rem <= 1e-12 * self.step.max(self.t_end) {
            full as usize
        } else {
            full as usize + 1
        }
    }

    /// Drives the integration, handing each sample `(t, y)` to `observer`
    /// starting with `t = 0`. The observer may stop the run early.
    pub fn drive(
        &self,
        y0: &[f64],
        mut observer: impl FnMut(f64, &[f64]) -> ControlFlow<()>,
    ) -> Result<()> {
        if y0.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: y0.len(),
            });
        }
        let dim = self.dimension;
        let mut y = y0.to_vec();
        let mut k1 = vec![0.0; dim];
        let mut k2 = vec![0.0; dim];
        let mut k3 = vec![0.0; dim];
        let mut k4 = vec![0.0; dim];
        let mut tmp = vec![0.0; dim];

        if observer(0.0, &y).is_break() {
            return Ok(());
        }
        let steps = self.num_steps();
        for i in 0..steps {
            let t = i as f64 * self.step;
            let t_next = if i + 1 == steps {
                self.t_end
            } else {
                (i + 1) as f64 * self.step
            };
            let h = t_next - t;

            self.eval(t, &y, &mut k1)?;
            for j in 0..dim {
                tmp[j] = y[j] + 0.5 * h * k1[j];
            }
            self.eval(t + 0.5 * h, &tmp, &mut k2)?;
            for j in 0..dim {
                tmp[j] = y[j] + 0.5 * h * k2[j];
            }
            self.eval(t + 0.5 * h, &tmp, &mut k3)?;
            for j in 0..dim {
                tmp[j] = y[j] + h * k3[j];
            }
            self.eval(t + h, &tmp, &mut k4)?;
            for j in 0..dim {
                y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
            }

            if observer(t_next, &y).is_break() {
                break;
            }
        }
        Ok(())
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        (self.rhs)(y, out);
        if out.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFiniteDerivative { t, y: y.to_vec() })
        }
    }
}

/// Integrates and returns every sample, including `t = 0` and `t = t_end`.
pub fn integrate_fixed_rk4<F>(spec: &OdeSpec<F>, y0: &[f64]) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: Fn(&[f64], &mut [f64]),
{
    let mut out = Vec::with_capacity(spec.num_steps() + 1);
    spec.drive(y0, |t, y| {
        out.push((t, y.to_vec()));
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn oscillator(y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    fn max_oscillator_error(step: f64, t_end: f64) -> f64 {
        let spec = OdeSpec::new(2, oscillator, step, t_end).unwrap();
        integrate_fixed_rk4(&spec, &[1.0, 0.0])
            .unwrap()
            .iter()
            .map(|(t, y)| (y[0] - t.cos()).abs().max((y[1] + t.sin()).abs()))
            .fold(0.0, f64::max)
    }

    #[test]
    fn oscillator_returns_after_one_period() {
        let spec = OdeSpec::new(2, oscillator, 1e-3, 2.0 * PI).unwrap();
        let series = integrate_fixed_rk4(&spec, &[1.0, 0.0]).unwrap();
        let (t, y) = series.last().unwrap();
        assert_eq!(*t, 2.0 * PI);
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10, "{y:?}");
        assert_eq!(series[0].0, 0.0);
    }

    #[test]
    fn constant_field_gives_constant_series() {
        let spec = OdeSpec::new(3, |_: &[f64], dy: &mut [f64]| dy.fill(0.0), 0.3, 1.0).unwrap();
        let series = integrate_fixed_rk4(&spec, &[1.0, -2.0, 0.5]).unwrap();
        assert_eq!(series.len(), 5);
        assert_eq!(series.last().unwrap().0, 1.0);
        assert!(series.iter().all(|(_, y)| y == &[1.0, -2.0, 0.5]));
    }

    #[test]
    fn fourth_order_convergence() {
        let e1 = max_oscillator_error(0.1, 10.0);
        let e2 = max_oscillator_error(0.05, 10.0);
        let ratio = e1 / e2;
        assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn forward_then_backward_recovers_initial_state() {
        let fwd = OdeSpec::new(2, oscillator, 0.01, 5.0).unwrap();
        let y1 = integrate_fixed_rk4(&fwd, &[0.3, 0.7]).unwrap().pop().unwrap().1;
        let back = OdeSpec::new(2, |y: &[f64], dy: &mut [f64]| {
            oscillator(y, dy);
            dy.iter_mut().for_each(|v| *v = -*v);
        }, 0.01, 5.0)
        .unwrap();
        let y0 = integrate_fixed_rk4(&back, &y1).unwrap().pop().unwrap().1;
        // Global error scales as h⁴ · t.
        assert!((y0[0] - 0.3).abs() < 1e-8 && (y0[1] - 0.7).abs() < 1e-8, "{y0:?}");
    }

    #[test]
    fn non_finite_derivative_aborts() {
        let spec = OdeSpec::new(1, |y: &[f64], dy: &mut [f64]| dy[0] = 1.0 / (1.0 - y[0]), 0.5, 3.0)
            .unwrap();
        let err = integrate_fixed_rk4(&spec, &[1.0]).unwrap_err();
        assert!(matches!(err, Error::NonFiniteDerivative { t, .. } if t == 0.0));
    }

    #[test]
    fn rejects_bad_spec() {
        assert!(OdeSpec::new(1, oscillator, 0.0, 1.0).is_err());
        assert!(OdeSpec::new(1, oscillator, 0.1, -1.0).is_err());
        let spec = OdeSpec::new(2, oscillator, 0.1, 1.0).unwrap();
        assert!(integrate_fixed_rk4(&spec, &[1.0]).is_err());
    }
}
