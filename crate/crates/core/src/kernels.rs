//! One-dimensional regularized-delta kernels and the tensor-product deltas
//! built from them.
//!
//! Two families are provided: centered cardinal B-splines `BS_n` (support
//! `(-n/2, n/2)`, `C^{n-2}`) and Peskin's four- and six-point IB kernels.
//! A [`CompositeDelta`] pairs a "normal" and a "tangential" kernel; for the
//! x-component of a vector quantity the normal kernel acts along x, for the
//! y-component it acts along y. Isotropic deltas use the same kernel twice.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest B-spline order exercised by the kernel catalogue.
pub const MAX_TESTED_ORDER: usize = 6;

/// Second moment of the six-point kernel, chosen so the kernel is `C^3`.
fn ib6_k() -> f64 {
    (59.0 / 60.0) * (1.0 - (1.0 - 3220.0 / 3481.0_f64).sqrt())
}

/// Centered cardinal B-spline of order `n`, evaluated by the centered
/// Cox–de Boor recurrence.
///
/// `BS_1` uses the half-open convention `BS_1(-1/2) = 1`, `BS_1(1/2) = 0`.
pub fn bspline_eval(n: usize, r: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidOrder { order: n, min: 1 });
    }
    Ok(bspline_recurrence(n, r))
}

fn bspline_recurrence(n: usize, r: f64) -> f64 {
    if n == 1 {
        return if (-0.5..0.5).contains(&r) { 1.0 } else { 0.0 };
    }
    let half = 0.5 * n as f64;
    if r <= -half || r >= half {
        return 0.0;
    }
    ((half + r) * bspline_recurrence(n - 1, r + 0.5) + (half - r) * bspline_recurrence(n - 1, r - 0.5)) / (n - 1) as f64
}

/// Derivative of `BS_n` through the central-difference identity
/// `BS_n'(r) = BS_{n-1}(r + 1/2) - BS_{n-1}(r - 1/2)`.
pub fn bspline_deriv(n: usize, r: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidOrder { order: n, min: 2 });
    }
    Ok(bspline_recurrence(n - 1, r + 0.5) - bspline_recurrence(n - 1, r - 0.5))
}

/// Which member of the IB kernel family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IbKernel {
    Ib4,
    Ib6,
}

/// Evaluate Peskin's four-point or the six-point IB kernel.
pub fn ib_kernel_eval(which: IbKernel, r: f64) -> f64 {
    match which {
        IbKernel::Ib4 => ib4(r),
        IbKernel::Ib6 => ib6(r),
    }
}

/// Analytic derivative of an IB kernel for use in the divergence-free
/// (DFIB) coupling, which needs at least two continuous derivatives.
pub fn ib_kernel_deriv(which: IbKernel, r: f64) -> Result<f64> {
    match which {
        IbKernel::Ib4 => Err(Error::InsufficientSmoothness {
            kernel: "ib4".into(),
            smoothness: 1,
        }),
        IbKernel::Ib6 => Ok(ib6_deriv(r)),
    }
}

fn ib4(r: f64) -> f64 {
    let a = r.abs();
    if a < 1.0 {
        (3.0 - 2.0 * a + (1.0 + 4.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else if a < 2.0 {
        (5.0 - 2.0 * a - (-7.0 + 12.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else {
        0.0
    }
}

fn ib4_deriv(r: f64) -> f64 {
    let a = r.abs();
    let d = if a < 1.0 {
        (-2.0 + (2.0 - 4.0 * a) / (1.0 + 4.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else if a < 2.0 {
        (-2.0 - (6.0 - 4.0 * a) / (-7.0 + 12.0 * a - 4.0 * a * a).sqrt()) / 8.0
    } else {
        0.0
    };
    if r == 0.0 {
        0.0
    } else {
        d * r.signum()
    }
}

/// Base branch of the six-point kernel: `phi(x - 3)` for `x` in `[0, 1]`,
/// the root of a quadratic fixed by the sum-of-squares condition.
/// Returns the value and its derivative.
fn ib6_base(x: f64) -> (f64, f64) {
    let k = ib6_k();
    let x2 = x * x;
    let x3 = x2 * x;
    let alpha = 28.0;
    let beta = 9.0 / 4.0 - 1.5 * (k + x2) + (22.0 / 3.0 - 7.0 * k) * x - 7.0 / 3.0 * x3;
    let dbeta = -3.0 * x + (22.0 / 3.0 - 7.0 * k) - 7.0 * x2;
    let g2 = 5.0 * k * k / 8.0 - 59.0 * k / 48.0 + 161.0 / 288.0;
    let g4 = 5.0 * k / 12.0 - 109.0 / 288.0;
    let g6 = 5.0 / 72.0;
    let gamma = x2 * (g2 + x2 * (g4 + x2 * g6));
    let dgamma = x * (2.0 * g2 + x2 * (4.0 * g4 + x2 * 6.0 * g6));
    let disc = beta * beta - 4.0 * alpha * gamma;
    let sgn = (1.5 - k).signum();
    let root = disc.sqrt();
    let value = (-beta + sgn * root) / (2.0 * alpha);
    let ddisc = 2.0 * beta * dbeta - 4.0 * alpha * dgamma;
    let deriv = (-dbeta + sgn * ddisc / (2.0 * root)) / (2.0 * alpha);
    (value, deriv)
}

/// Six-point kernel on `[-3, 0]`, returning value and derivative.
fn ib6_left(r: f64) -> (f64, f64) {
    let k = ib6_k();
    if r <= -3.0 {
        return (0.0, 0.0);
    }
    if r <= -2.0 {
        let x = r + 3.0;
        ib6_base(x)
    } else if r <= -1.0 {
        let x = r + 2.0;
        let (p, dp) = ib6_base(x);
        let v = -3.0 * p - 1.0 / 16.0 + (k + x * x) / 8.0 + (3.0 * k - 1.0) * x / 12.0 + x * x * x / 12.0;
        let d = -3.0 * dp + x / 4.0 + (3.0 * k - 1.0) / 12.0 + x * x / 4.0;
        (v, d)
    } else {
        let x = r + 1.0;
        let (p, dp) = ib6_base(x);
        let v = 2.0 * p + 0.25 + (4.0 - 3.0 * k) * x / 6.0 - x * x * x / 6.0;
        let d = 2.0 * dp + (4.0 - 3.0 * k) / 6.0 - x * x / 2.0;
        (v, d)
    }
}

fn ib6(r: f64) -> f64 {
    ib6_left(-r.abs()).0
}

fn ib6_deriv(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    // phi(r) = g(-|r|)  =>  phi'(r) = -sign(r) g'(-|r|)
    -r.signum() * ib6_left(-r.abs()).1
}

/// Polynomial pieces of the uncentered B-spline `B_n` on `[0, n]`, piece `k`
/// covering `[k, k+1)` in the local variable `t = x - k`. Coefficients are
/// ascending powers of `t`.
fn bspline_pieces(n: usize) -> Vec<Vec<f64>> {
    let mut pieces: Vec<Vec<f64>> = vec![vec![1.0]];
    for m in 2..=n {
        let mut next = Vec::with_capacity(m);
        let denom = (m - 1) as f64;
        for k in 0..m {
            let mut poly = vec![0.0; m];
            // (k + t) * P_{m-1,k}(t)
            if k < m - 1 {
                for (p, &c) in pieces[k].iter().enumerate() {
                    poly[p] += k as f64 * c;
                    poly[p + 1] += c;
                }
            }
            // (m - k - t) * P_{m-1,k-1}(t)
            if k >= 1 {
                for (p, &c) in pieces[k - 1].iter().enumerate() {
                    poly[p] += (m - k) as f64 * c;
                    poly[p + 1] -= c;
                }
            }
            poly.iter_mut().for_each(|c| *c /= denom);
            next.push(poly);
        }
        pieces = next;
    }
    pieces
}

fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
}

/// Kernel family tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelFamily {
    BSpline(usize),
    Ib4,
    Ib6,
}

/// A one-dimensional regularized-delta building block.
///
/// B-splines are evaluated from polynomial pieces tabulated at construction
/// with the same recurrence as [`bspline_eval`].
#[derive(Clone, Debug)]
pub struct Kernel1D {
    family: KernelFamily,
    pieces: Vec<Vec<f64>>,
    dpieces: Vec<Vec<f64>>,
}

impl Kernel1D {
    pub fn bspline(order: usize) -> Result<Self> {
        if order < 1 {
            return Err(Error::InvalidOrder { order, min: 1 });
        }
        let pieces = bspline_pieces(order);
        let dpieces = pieces
            .iter()
            .map(|p| p.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
            .collect();
        Ok(Self {
            family: KernelFamily::BSpline(order),
            pieces,
            dpieces,
        })
    }

    pub fn ib(which: IbKernel) -> Self {
        let family = match which {
            IbKernel::Ib4 => KernelFamily::Ib4,
            IbKernel::Ib6 => KernelFamily::Ib6,
        };
        Self {
            family,
            pieces: Vec::new(),
            dpieces: Vec::new(),
        }
    }

    pub fn family(&self) -> KernelFamily {
        self.family
    }

    pub fn support_half_width(&self) -> f64 {
        match self.family {
            KernelFamily::BSpline(n) => 0.5 * n as f64,
            KernelFamily::Ib4 => 2.0,
            KernelFamily::Ib6 => 3.0,
        }
    }

    /// Number of continuous derivatives; `-1` marks a discontinuous kernel.
    pub fn smoothness(&self) -> i32 {
        match self.family {
            KernelFamily::BSpline(n) => n as i32 - 2,
            KernelFamily::Ib4 => 1,
            KernelFamily::Ib6 => 3,
        }
    }

    #[inline]
    pub fn eval(&self, r: f64) -> f64 {
        match self.family {
            KernelFamily::BSpline(1) => {
                if (-0.5..0.5).contains(&r) {
                    1.0
                } else {
                    0.0
                }
            }
            KernelFamily::BSpline(n) => {
                // continuous for n >= 2, so evaluating at -|r| is exact symmetry
                let x = 0.5 * n as f64 - r.abs();
                if x <= 0.0 {
                    return 0.0;
                }
                let k = x.floor();
                horner(&self.pieces[k as usize], x - k)
            }
            KernelFamily::Ib4 => ib4(r),
            KernelFamily::Ib6 => ib6(r),
        }
    }

    /// Derivative where it exists; zero almost everywhere for `BS_1`.
    #[inline]
    pub fn deriv(&self, r: f64) -> f64 {
        match self.family {
            KernelFamily::BSpline(1) => 0.0,
            KernelFamily::BSpline(n) => {
                if r == 0.0 {
                    return 0.0;
                }
                let x = 0.5 * n as f64 - r.abs();
                if x <= 0.0 {
                    return 0.0;
                }
                let k = x.floor();
                -r.signum() * horner(&self.dpieces[k as usize], x - k)
            }
            KernelFamily::Ib4 => ib4_deriv(r),
            KernelFamily::Ib6 => ib6_deriv(r),
        }
    }

    pub fn name(&self) -> String {
        match self.family {
            KernelFamily::BSpline(n) => format!("bs{n}"),
            KernelFamily::Ib4 => "ib4".into(),
            KernelFamily::Ib6 => "ib6".into(),
        }
    }
}

/// Kernel selection as accepted by the CLI and config files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelChoice {
    /// `BS_{k+1}` normal to the component, `BS_k` tangential.
    Composite(usize),
    Ib4,
    Ib6,
}

impl KernelChoice {
    pub const ALL: [KernelChoice; 7] = [
        KernelChoice::Composite(1),
        KernelChoice::Composite(2),
        KernelChoice::Composite(3),
        KernelChoice::Composite(4),
        KernelChoice::Composite(5),
        KernelChoice::Ib4,
        KernelChoice::Ib6,
    ];

    pub fn is_isotropic(&self) -> bool {
        !matches!(self, KernelChoice::Composite(_))
    }

    /// Smoothness of the least regular factor.
    pub fn smoothness(&self) -> i32 {
        match *self {
            KernelChoice::Composite(k) => k as i32 - 2,
            KernelChoice::Ib4 => 1,
            KernelChoice::Ib6 => 3,
        }
    }
}

impl fmt::Display for KernelChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelChoice::Composite(k) => write!(f, "bs{}bs{}", k + 1, k),
            KernelChoice::Ib4 => f.write_str("ib4"),
            KernelChoice::Ib6 => f.write_str("ib6"),
        }
    }
}

impl FromStr for KernelChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "ib4" => return Ok(KernelChoice::Ib4),
            "ib6" => return Ok(KernelChoice::Ib6),
            _ => {}
        }
        for k in 1..MAX_TESTED_ORDER {
            if lower == format!("bs{}bs{}", k + 1, k) {
                return Ok(KernelChoice::Composite(k));
            }
        }
        Err(Error::UnknownKernel(s.to_string()))
    }
}

/// Velocity/force component selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    X,
    Y,
}

/// Tensor-product regularized delta `delta_h(x) = phi(x/h) psi(y/h) / h^2`.
#[derive(Clone, Debug)]
pub struct CompositeDelta {
    pub normal: Kernel1D,
    pub tangential: Kernel1D,
    pub h: f64,
    choice: KernelChoice,
}

impl CompositeDelta {
    pub fn new(choice: KernelChoice, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Parameter {
                name: "h",
                reason: format!("must be positive, got {h}"),
            });
        }
        let (normal, tangential) = match choice {
            KernelChoice::Composite(k) => (Kernel1D::bspline(k + 1)?, Kernel1D::bspline(k)?),
            KernelChoice::Ib4 => (Kernel1D::ib(IbKernel::Ib4), Kernel1D::ib(IbKernel::Ib4)),
            KernelChoice::Ib6 => (Kernel1D::ib(IbKernel::Ib6), Kernel1D::ib(IbKernel::Ib6)),
        };
        Ok(Self {
            normal,
            tangential,
            h,
            choice,
        })
    }

    pub fn choice(&self) -> KernelChoice {
        self.choice
    }

    pub fn is_isotropic(&self) -> bool {
        self.choice.is_isotropic()
    }

    /// Kernels acting along x and y for the given component.
    #[inline]
    pub fn axes(&self, component: Component) -> (&Kernel1D, &Kernel1D) {
        match component {
            Component::X => (&self.normal, &self.tangential),
            Component::Y => (&self.tangential, &self.normal),
        }
    }

    /// `delta_h(dx, dy)` for the given component, in units of 1/length².
    pub fn weight(&self, component: Component, dx: f64, dy: f64) -> f64 {
        let (kx, ky) = self.axes(component);
        kx.eval(dx / self.h) * ky.eval(dy / self.h) / (self.h * self.h)
    }
}

/// Free-function form of [`CompositeDelta::weight`].
pub fn delta_weight(delta: &CompositeDelta, component: Component, dx: f64, dy: f64) -> f64 {
    delta.weight(component, dx, dy)
}

/// `(-d delta/dy, d delta/dx)` for the isotropic delta built from `kernel`,
/// evaluated at the argument `(dx, dy)`. Units 1/length³.
pub fn delta_perp_gradient(kernel: &Kernel1D, dx: f64, dy: f64, h: f64) -> Result<[f64; 2]> {
    if kernel.smoothness() < 2 {
        return Err(Error::InsufficientSmoothness {
            kernel: kernel.name(),
            smoothness: kernel.smoothness(),
        });
    }
    let (rx, ry) = (dx / h, dy / h);
    let h3 = h * h * h;
    let ddx = kernel.deriv(rx) * kernel.eval(ry) / h3;
    let ddy = kernel.eval(rx) * kernel.deriv(ry) / h3;
    Ok([-ddy, ddx])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_kernels() -> Vec<Kernel1D> {
        let mut v: Vec<Kernel1D> = (1..=6).map(|n| Kernel1D::bspline(n).unwrap()).collect();
        v.push(Kernel1D::ib(IbKernel::Ib4));
        v.push(Kernel1D::ib(IbKernel::Ib6));
        v
    }

    /// `BS_n(r) = \int_{r-1/2}^{r+1/2} BS_{n-1}(q) dq`, composite trapezoid on a
    /// 1e-4 grid, split at the knots of `BS_{n-1}` so every panel is smooth.
    fn convolution_oracle(n: usize, r: f64) -> f64 {
        let (a, b) = (r - 0.5, r + 0.5);
        let m = n - 1;
        let mut cuts = vec![a, b];
        for j in 0..=m {
            let knot = j as f64 - 0.5 * m as f64;
            if knot > a && knot < b {
                cuts.push(knot);
            }
        }
        cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut total = 0.0;
        for w in cuts.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            let panels = (((hi - lo) / 1e-4).ceil() as usize).max(1);
            let step = (hi - lo) / panels as f64;
            // interior limits avoid the knot itself so one-sided values are used
            let f = |q: f64| bspline_eval(m, q.clamp(lo + 1e-12, hi - 1e-12)).unwrap();
            let mut s = 0.5 * (f(lo) + f(hi));
            for i in 1..panels {
                s += f(lo + i as f64 * step);
            }
            total += s * step;
        }
        total
    }

    #[test]
    fn bspline_examples() {
        assert_eq!(bspline_eval(1, 0.0).unwrap(), 1.0);
        assert_eq!(bspline_eval(2, 0.0).unwrap(), 1.0);
        assert!((bspline_eval(3, 0.0).unwrap() - 0.75).abs() < 1e-15);
        assert!((convolution_oracle(3, 0.0) - 0.75).abs() < 1e-8);
        assert_eq!(bspline_eval(4, 2.0).unwrap(), 0.0);
        assert!(bspline_eval(0, 0.0).is_err());
        assert_eq!(bspline_eval(1, -0.5).unwrap(), 1.0);
        assert_eq!(bspline_eval(1, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn bspline_matches_convolution_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=6 {
            for _ in 0..25 {
                let r: f64 = rng.gen_range(-0.5 * n as f64 - 0.2..0.5 * n as f64 + 0.2);
                let want = convolution_oracle(n, r);
                let got = bspline_eval(n, r).unwrap();
                assert!((got - want).abs() <= 1e-6, "n={n} r={r}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn tabulated_pieces_match_recurrence() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=8 {
            let k = Kernel1D::bspline(n).unwrap();
            for _ in 0..200 {
                let r: f64 = rng.gen_range(-5.0..5.0);
                assert!((k.eval(r) - bspline_eval(n, r).unwrap()).abs() < 1e-14);
                if n >= 2 {
                    assert!((k.deriv(r) - bspline_deriv(n, r).unwrap()).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn bspline_derivative_examples() {
        assert_eq!(bspline_deriv(2, -0.5).unwrap(), 1.0);
        assert_eq!(bspline_deriv(3, 0.0).unwrap(), 0.0);
        assert!(bspline_deriv(1, 0.0).is_err());
        let step = 1e-6;
        let fd = (bspline_eval(4, 0.3 + step).unwrap() - bspline_eval(4, 0.3 - step).unwrap()) / (2.0 * step);
        assert!((bspline_deriv(4, 0.3).unwrap() - fd).abs() <= 1e-5);
    }

    /// k-th derivative of BS_n via repeated application of the difference identity.
    fn nth_derivative(n: usize, k: usize, r: f64) -> f64 {
        if k == 0 {
            return bspline_eval(n, r).unwrap();
        }
        nth_derivative(n - 1, k - 1, r + 0.5) - nth_derivative(n - 1, k - 1, r - 0.5)
    }

    #[test]
    fn continuity_class_across_knots() {
        let eps = 1e-9;
        let step = 1e-6;
        for n in 3..=6 {
            for j in 0..=n {
                let knot = j as f64 - 0.5 * n as f64;
                // finite-difference estimate of the (n-2)-th derivative from each side
                let left = (nth_derivative(n, n - 3, knot - eps) - nth_derivative(n, n - 3, knot - eps - step)) / step;
                let right = (nth_derivative(n, n - 3, knot + eps + step) - nth_derivative(n, n - 3, knot + eps)) / step;
                assert!((left - right).abs() < 1e-4, "n={n} knot={knot}: {left} vs {right}");
                let jl = nth_derivative(n, n - 1, knot - eps);
                let jr = nth_derivative(n, n - 1, knot + eps);
                assert!(
                    (jl - jr).abs() > 0.5,
                    "n={n} knot={knot}: (n-1)th derivative should jump"
                );
            }
        }
    }

    #[test]
    fn ib_kernel_examples() {
        assert!((ib_kernel_eval(IbKernel::Ib4, 0.0) - 0.5).abs() < 1e-15);
        assert_eq!(ib_kernel_eval(IbKernel::Ib4, 2.0), 0.0);
        assert_eq!(ib_kernel_deriv(IbKernel::Ib6, 0.0).unwrap(), 0.0);
        assert_eq!(ib_kernel_deriv(IbKernel::Ib6, 3.0).unwrap(), 0.0);
        assert!(ib_kernel_deriv(IbKernel::Ib4, 0.3).is_err());
        let step = 1e-5;
        let fd = (ib6(0.7 + step) - ib6(0.7 - step)) / (2.0 * step);
        assert!((ib_kernel_deriv(IbKernel::Ib6, 0.7).unwrap() - fd).abs() <= 1e-8);
    }

    #[test]
    fn ib_derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for which in [IbKernel::Ib4, IbKernel::Ib6] {
            let k = Kernel1D::ib(which);
            for _ in 0..500 {
                let r: f64 = rng.gen_range(-3.5..3.5);
                let step = 1e-6;
                let fd = (k.eval(r + step) - k.eval(r - step)) / (2.0 * step);
                assert!((k.deriv(r) - fd).abs() < 1e-7, "{which:?} r={r}");
            }
        }
    }

    #[test]
    fn ib6_moment_and_square_sum_conditions() {
        let k = Kernel1D::ib(IbKernel::Ib6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut square_sums = Vec::new();
        for _ in 0..200 {
            let r: f64 = rng.gen();
            let w: Vec<(f64, f64)> = (-4..=4).map(|j| (r - j as f64, k.eval(r - j as f64))).collect();
            let even: f64 = (-4..=4).zip(&w).filter(|(j, _)| j % 2 == 0).map(|(_, p)| p.1).sum();
            let second: f64 = w.iter().map(|(d, p)| d * d * p).sum();
            let third: f64 = w.iter().map(|(d, p)| d * d * d * p).sum();
            assert!((even - 0.5).abs() < 1e-14);
            assert!((second - ib6_k()).abs() < 1e-13);
            assert!(third.abs() < 1e-13);
            square_sums.push(w.iter().map(|(_, p)| p * p).sum::<f64>());
        }
        let spread =
            square_sums.iter().cloned().fold(f64::MIN, f64::max) - square_sums.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread < 1e-14);
    }

    #[test]
    fn ib6_is_c3_at_knots() {
        // one-sided derivatives of the analytic first derivative up to third order
        let k = Kernel1D::ib(IbKernel::Ib6);
        for knot in [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
            let e = 1e-4;
            let d = |r: f64| k.deriv(r);
            let l2 = (d(knot - e) - d(knot - 2.0 * e)) / e;
            let r2 = (d(knot + 2.0 * e) - d(knot + e)) / e;
            assert!((l2 - r2).abs() < 1e-2, "second derivative jump at {knot}");
            assert!((d(knot - 1e-9) - d(knot + 1e-9)).abs() < 1e-7);
        }
    }

    #[test]
    fn kernel_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for k in all_kernels() {
            let hw = k.support_half_width();
            for _ in 0..1000 {
                let r: f64 = rng.gen_range(-4.0..4.0);
                if k.family() != KernelFamily::BSpline(1) {
                    assert_eq!(k.eval(r), k.eval(-r), "{} even", k.name());
                }
                let s: f64 = (-6..=6).map(|j| k.eval(r - j as f64)).sum();
                assert!((s - 1.0).abs() <= 1e-12, "{} partition of unity", k.name());
                // the box kernel picks out a single offset, so its moment is r - round(r)
                if k.family() != KernelFamily::BSpline(1) {
                    let m1: f64 = (-6..=6).map(|j| (r - j as f64) * k.eval(r - j as f64)).sum();
                    assert!(m1.abs() <= 1e-12, "{} first moment {m1}", k.name());
                }
            }
            assert_eq!(k.eval(hw), 0.0);
            assert_eq!(k.eval(-hw - 1e-9), 0.0);
            assert_eq!(k.eval(hw + 0.5), 0.0);
        }
    }

    #[test]
    fn kernel_choice_parsing() {
        for c in KernelChoice::ALL {
            assert_eq!(c.to_string().parse::<KernelChoice>().unwrap(), c);
        }
        assert!("bs4bs2".parse::<KernelChoice>().is_err());
        assert!("gauss".parse::<KernelChoice>().is_err());
    }

    #[test]
    fn delta_weight_examples() {
        let d = CompositeDelta::new(KernelChoice::Composite(1), 1.0).unwrap();
        assert_eq!(delta_weight(&d, Component::X, 0.0, 0.0), 1.0);
        for c in KernelChoice::ALL {
            let d = CompositeDelta::new(c, 0.3).unwrap();
            let hw = d.normal.support_half_width().max(d.tangential.support_half_width());
            assert_eq!(d.weight(Component::X, 0.3 * hw, 0.0), 0.0);
            assert_eq!(d.weight(Component::Y, 0.0, 0.3 * hw), 0.0);
        }
        let d = CompositeDelta::new(KernelChoice::Ib4, 0.5).unwrap();
        assert!((d.weight(Component::X, 0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_weight_integrates_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for c in KernelChoice::ALL {
            let h = 0.37;
            let d = CompositeDelta::new(c, h).unwrap();
            for comp in [Component::X, Component::Y] {
                for _ in 0..20 {
                    let (fx, fy): (f64, f64) = (rng.gen(), rng.gen());
                    let mut s = 0.0;
                    for i in -5..=5 {
                        for j in -5..=5 {
                            s += d.weight(comp, (i as f64 - fx) * h, (j as f64 - fy) * h) * h * h;
                        }
                    }
                    assert!((s - 1.0).abs() <= 1e-12, "{c} {comp:?}: {s}");
                }
            }
        }
    }

    #[test]
    fn perp_gradient_examples() {
        let k6 = Kernel1D::ib(IbKernel::Ib6);
        let h = 0.1;
        assert_eq!(delta_perp_gradient(&k6, 0.0, 0.0, h).unwrap(), [0.0, 0.0]);
        let g = delta_perp_gradient(&k6, 3.0 * h, 0.05, h).unwrap();
        assert_eq!(g, [0.0, 0.0]);
        assert!(delta_perp_gradient(&Kernel1D::ib(IbKernel::Ib4), 0.0, 0.0, h).is_err());
        assert!(delta_perp_gradient(&Kernel1D::bspline(3).unwrap(), 0.0, 0.0, h).is_err());

        let d = CompositeDelta::new(KernelChoice::Ib6, h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..200 {
            let (dx, dy): (f64, f64) = (rng.gen_range(-0.35..0.35), rng.gen_range(-0.35..0.35));
            let step = 1e-6;
            let ddx = (d.weight(Component::X, dx + step, dy) - d.weight(Component::X, dx - step, dy)) / (2.0 * step);
            let ddy = (d.weight(Component::X, dx, dy + step) - d.weight(Component::X, dx, dy - step)) / (2.0 * step);
            let g = delta_perp_gradient(&k6, dx, dy, h).unwrap();
            // scale-free comparison: |grad delta| ~ 1/h^3
            let scale = h * h * h;
            assert!((g[0] + ddy).abs() * scale <= 1e-7);
            assert!((g[1] - ddx).abs() * scale <= 1e-7);
        }
    }
}
