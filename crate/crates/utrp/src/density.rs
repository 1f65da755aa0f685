//! Polynomials and piecewise-polynomial densities on bounded real supports.
//!
//! Every continuous timestamp distribution is represented as a
//! [`PiecewiseDensity`]: an ordered list of contiguous `[lo, hi)` intervals,
//! each carrying polynomial coefficients. Uniform densities are degree-0
//! pieces. The representation is closed under the product-and-integrate step
//! of the order-probability recursion, which keeps that computation exact up
//! to floating-point rounding.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense polynomial with ascending coefficients: `c[0] + c[1]*x + ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![])
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::zero();
        }
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    /// Antiderivative with constant term 0.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![0.0; self.0.len() + 1];
        for (i, &c) in self.0.iter().enumerate() {
            out[i + 1] = c / (i as f64 + 1.0);
        }
        Poly(out)
    }

    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        let a = self.antiderivative();
        a.eval(hi) - a.eval(lo)
    }

    /// Substitution `x -> c + s*x`, i.e. returns `q` with `q(x) = p(c + s*x)`.
    pub fn compose_affine(&self, c: f64, s: f64) -> Poly {
        let mut acc = Poly::zero();
        for &coeff in self.0.iter().rev() {
            // acc = acc * (c + s*x) + coeff
            let mut next = vec![0.0; acc.0.len() + 1];
            for (i, &a) in acc.0.iter().enumerate() {
                next[i] += a * c;
                next[i + 1] += a * s;
            }
            if next.is_empty() {
                next.push(coeff);
            } else {
                next[0] += coeff;
            }
            acc = Poly(next);
        }
        acc.trim()
    }

    fn trim(mut self) -> Poly {
        while matches!(self.0.last(), Some(&c) if c == 0.0) {
            self.0.pop();
        }
        self
    }
}

/// One density piece on `[lo, hi)`. The polynomial is over the piece-local
/// coordinate `u = (x - lo) / (hi - lo) ∈ [0, 1)`, and the density value is
/// `poly(u) / (hi - lo)`. Local coordinates keep polynomial arithmetic
/// well-conditioned regardless of the absolute time scale (epoch seconds
/// would otherwise destroy precision through cancellation), and they make
/// affine changes of variable exact: only the bounds move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub poly: Poly,
}

impl Piece {
    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }

    /// Mass of the piece: `∫ poly(u) du` over `[0, 1]`.
    pub fn mass(&self) -> f64 {
        self.poly.integral(0.0, 1.0)
    }

    /// Density value at an absolute coordinate inside the piece.
    pub fn density_at(&self, x: f64) -> f64 {
        let u = (x - self.lo) / self.span();
        self.poly.eval(u) / self.span()
    }

    /// The density as a polynomial in the absolute coordinate. Only safe
    /// numerically when `lo`/`hi` are of moderate magnitude (callers rescale
    /// supports into [0, 1] first).
    pub fn absolute_poly(&self) -> Poly {
        let s = self.span();
        self.poly.compose_affine(-self.lo / s, 1.0 / s).scale(1.0 / s)
    }
}

/// Normalized piecewise-polynomial density on a bounded support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseDensity {
    pieces: Vec<Piece>,
}

pub const MASS_TOLERANCE: f64 = 1e-9;

impl PiecewiseDensity {
    /// Builds a density, requiring contiguous pieces, non-negativity on a
    /// sample grid, and total mass 1 within `1e-9`.
    pub fn new(pieces: Vec<Piece>) -> Result<Self> {
        let d = Self::new_unnormalized(pieces)?;
        let mass = d.total_mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::Validation(format!(
                "density mass {mass} deviates from 1 beyond tolerance"
            )));
        }
        Ok(d)
    }

    /// Builds a density with arbitrary positive mass; used by loaders that
    /// renormalize afterwards.
    pub fn new_unnormalized(pieces: Vec<Piece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::Validation("density has no pieces".into()));
        }
        for w in pieces.windows(2) {
            if (w[0].hi - w[1].lo).abs() > 1e-12 * w[1].lo.abs().max(1.0) {
                return Err(Error::Validation(
                    "density pieces are not contiguous".into(),
                ));
            }
        }
        for p in &pieces {
            if !(p.lo < p.hi) || !p.lo.is_finite() || !p.hi.is_finite() {
                return Err(Error::Validation(format!(
                    "density piece [{}, {}) is empty or unbounded",
                    p.lo, p.hi
                )));
            }
            // spot-check non-negativity on a grid
            for k in 0..=8 {
                let u = k as f64 / 8.0;
                if p.poly.eval(u) < -1e-9 {
                    return Err(Error::Validation(format!(
                        "density is negative at {}",
                        p.lo + u * p.span()
                    )));
                }
            }
        }
        let mass: f64 = pieces.iter().map(Piece::mass).sum();
        if mass <= 0.0 {
            return Err(Error::Validation("density mass is not positive".into()));
        }
        Ok(PiecewiseDensity { pieces })
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::Validation(format!(
                "uniform density needs lo < hi, got [{lo}, {hi}]"
            )));
        }
        Self::new(vec![Piece { lo, hi, poly: Poly::constant(1.0) }])
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn support(&self) -> (f64, f64) {
        (self.pieces[0].lo, self.pieces[self.pieces.len() - 1].hi)
    }

    pub fn total_mass(&self) -> f64 {
        self.pieces.iter().map(Piece::mass).sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x < lo || x >= hi {
            return 0.0;
        }
        for p in &self.pieces {
            if x < p.hi {
                return p.density_at(x);
            }
        }
        0.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for p in &self.pieces {
            if x >= p.hi {
                acc += p.mass();
            } else if x > p.lo {
                acc += p.poly.integral(0.0, (x - p.lo) / p.span());
                break;
            } else {
                break;
            }
        }
        acc
    }

    pub fn rescale_mass(&self, factor: f64) -> PiecewiseDensity {
        PiecewiseDensity {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo,
                    hi: p.hi,
                    poly: p.poly.scale(factor),
                })
                .collect(),
        }
    }

    /// Density of `Y = (X - c) / s` for `s > 0`. Exact: in local coordinates
    /// only the piece bounds change.
    pub fn affine(&self, c: f64, s: f64) -> PiecewiseDensity {
        PiecewiseDensity {
            pieces: self
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: (p.lo - c) / s,
                    hi: (p.hi - c) / s,
                    poly: p.poly.clone(),
                })
                .collect(),
        }
    }

    /// Inverse-CDF sampling: pick a piece by mass, then bisect within it.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let total = self.total_mass();
        let target = rng.gen::<f64>() * total;
        let mut acc = 0.0;
        for p in &self.pieces {
            let m = p.mass();
            if acc + m >= target || std::ptr::eq(p, self.pieces.last().unwrap()) {
                let within = (target - acc).clamp(0.0, m);
                let (mut lo, mut hi) = (0.0f64, 1.0f64);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if p.poly.integral(0.0, mid) < within {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                return p.lo + 0.5 * (lo + hi) * p.span();
            }
            acc += m;
        }
        unreachable!("piece selection covers the full mass")
    }
}
