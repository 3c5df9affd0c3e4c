use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::SquareMatrix;
use super::poly::MultiPoly;
use crate::error::{Error, Result};

/// Constant-coefficient operator `P(∂_z)`, stored through its symbol `P(ξ)`.
///
/// `order` is the total degree of the symbol for the default type
/// `(1, …, 1)`, and the weighted degree `|kN|` otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiffOpRepr", into = "DiffOpRepr")]
pub struct DiffOp {
    symbol: MultiPoly,
    order: u32,
    quasi_type: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct DiffOpRepr {
    symbol: MultiPoly,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    quasi_type: Option<Vec<u32>>,
}

impl TryFrom<DiffOpRepr> for DiffOp {
    type Error = Error;
    fn try_from(r: DiffOpRepr) -> Result<Self> {
        match r.quasi_type {
            Some(n) if n.iter().any(|&k| k != 1) => DiffOp::quasi_homogeneous(r.symbol, n),
            Some(n) if n.len() != r.symbol.dim() => Err(Error::DimensionMismatch {
                expected: r.symbol.dim(),
                found: n.len(),
            }),
            _ => DiffOp::new(r.symbol),
        }
    }
}

impl From<DiffOp> for DiffOpRepr {
    fn from(d: DiffOp) -> Self {
        let trivial = d.quasi_type.iter().all(|&k| k == 1);
        DiffOpRepr {
            symbol: d.symbol,
            quasi_type: (!trivial).then_some(d.quasi_type),
        }
    }
}

fn weighted_degree(exp: &[u32], weights: &[u32]) -> u32 {
    exp.iter().zip(weights).map(|(k, w)| k * w).sum()
}

impl DiffOp {
    /// Operator with symbol `symbol`; order is its total degree.
    pub fn new(symbol: MultiPoly) -> Result<Self> {
        let order = symbol
            .degree()
            .ok_or_else(|| Error::Precondition("operator symbol is identically zero".into()))?;
        let n = symbol.dim();
        Ok(Self {
            symbol,
            order,
            quasi_type: vec![1; n],
        })
    }

    /// Quasi-homogeneous operator of type `weights`: every term must share the
    /// same weighted degree, which becomes the order.
    pub fn quasi_homogeneous(symbol: MultiPoly, weights: Vec<u32>) -> Result<Self> {
        if weights.len() != symbol.dim() {
            return Err(Error::DimensionMismatch {
                expected: symbol.dim(),
                found: weights.len(),
            });
        }
        if weights.contains(&0) {
            return Err(Error::Precondition("quasi-homogeneity weights must be positive".into()));
        }
        let mut orders = symbol.terms().map(|(e, _)| weighted_degree(e, &weights));
        let order = orders
            .next()
            .ok_or_else(|| Error::Precondition("operator symbol is identically zero".into()))?;
        if orders.any(|o| o != order) {
            return Err(Error::Precondition(format!(
                "symbol is not quasi-homogeneous of type {weights:?}"
            )));
        }
        drop(orders);
        Ok(Self {
            symbol,
            order,
            quasi_type: weights,
        })
    }

    /// `Δ = Σ ∂²_{z_k}`.
    pub fn laplacian(n: usize) -> Self {
        let terms = (0..n).map(|k| {
            let mut e = vec![0; n];
            e[k] = 2;
            (e, Complex64::new(1.0, 0.0))
        });
        Self::new(MultiPoly::from_terms(n, terms).expect("valid")).expect("nonzero")
    }

    /// `□ = ∂²_{z_1} − Σ_{k≥2} ∂²_{z_k}`.
    pub fn wave(n: usize) -> Self {
        let terms = (0..n).map(|k| {
            let mut e = vec![0; n];
            e[k] = 2;
            (e, Complex64::new(if k == 0 { 1.0 } else { -1.0 }, 0.0))
        });
        Self::new(MultiPoly::from_terms(n, terms).expect("valid")).expect("nonzero")
    }

    /// `∂^order_{z_i}`.
    pub fn partial(n: usize, i: usize, order: u32) -> Self {
        let mut e = vec![0; n];
        e[i] = order;
        Self::new(MultiPoly::monomial(n, e, Complex64::new(1.0, 0.0))).expect("nonzero")
    }

    /// `Σ a_k ∂_{z_k}`.
    pub fn first_order(a: &[Complex64]) -> Result<Self> {
        let n = a.len();
        let terms = a.iter().enumerate().map(|(k, &c)| {
            let mut e = vec![0; n];
            e[k] = 1;
            (e, c)
        });
        Self::new(MultiPoly::from_terms(n, terms)?)
    }

    /// `Σ_{i,j} a_ij ∂²_{z_i z_j}` for a symmetric matrix `A`.
    pub fn second_order(a: &SquareMatrix) -> Result<Self> {
        let n = a.dim();
        let mut terms = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut e = vec![0; n];
                e[i] += 1;
                e[j] += 1;
                terms.push((e, a.get(i, j)));
            }
        }
        Self::new(MultiPoly::from_terms(n, terms)?)
    }

    pub fn symbol(&self) -> &MultiPoly {
        &self.symbol
    }

    pub fn dim(&self) -> usize {
        self.symbol.dim()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn quasi_type(&self) -> &[u32] {
        &self.quasi_type
    }

    /// Every term has total degree equal to the order (for type `(1,…,1)`).
    pub fn is_homogeneous(&self) -> bool {
        self.symbol
            .terms()
            .all(|(e, _)| e.iter().sum::<u32>() == self.order)
    }

    /// Every term has weighted degree `|kN|` equal to the order.
    pub fn is_quasi_homogeneous(&self) -> bool {
        self.symbol
            .terms()
            .all(|(e, _)| weighted_degree(e, &self.quasi_type) == self.order)
    }

    /// Smallest total differentiation order among the terms.
    pub fn min_order(&self) -> u32 {
        self.symbol.min_degree().unwrap_or(0)
    }

    /// The composed operator `P^s`.
    pub fn power(&self, s: u32) -> Result<Self> {
        let symbol = self.symbol.pow(s)?;
        if symbol.is_zero() {
            return Err(Error::Precondition("operator power vanishes".into()));
        }
        Ok(Self {
            symbol,
            order: self.order * s,
            quasi_type: self.quasi_type.clone(),
        })
    }

    /// `P(ζ)`.
    pub fn eval_symbol(&self, zeta: &[Complex64]) -> Result<Complex64> {
        self.symbol.eval(zeta)
    }

    pub fn apply(&self, phi: &MultiPoly) -> Result<MultiPoly> {
        apply_diffop(self, phi)
    }
}

/// `P(∂_z)φ = Σ a_k ∂^k φ`.
pub fn apply_diffop(p: &DiffOp, phi: &MultiPoly) -> Result<MultiPoly> {
    if p.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let mut out = MultiPoly::zero(phi.dim());
    for (k, a) in p.symbol.terms() {
        let d = phi.derivative(k)?;
        if !d.is_zero() {
            out = out.add(&d.scale(*a))?;
        }
    }
    Ok(out)
}

/// `P^j(∂_z)φ` by `j`-fold application.
pub fn iterate_diffop(p: &DiffOp, phi: &MultiPoly, j: usize) -> Result<MultiPoly> {
    if p.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: phi.dim(),
        });
    }
    let mut cur = phi.clone();
    for _ in 0..j {
        if cur.is_zero() {
            break;
        }
        cur = apply_diffop(p, &cur)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly1(terms: &[(u32, f64)]) -> MultiPoly {
        MultiPoly::from_terms(1, terms.iter().map(|&(k, c)| (vec![k], Complex64::new(c, 0.0)))).unwrap()
    }

    #[test]
    fn first_derivative_of_square() {
        let p = DiffOp::partial(1, 0, 1);
        assert_eq!(apply_diffop(&p, &poly1(&[(2, 1.0)])).unwrap(), poly1(&[(1, 2.0)]));
    }

    #[test]
    fn laplacian_of_radius_squared() {
        let phi = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let r = apply_diffop(&DiffOp::laplacian(2), &phi).unwrap();
        assert_eq!(r, MultiPoly::constant(2, Complex64::new(4.0, 0.0)));
    }

    #[test]
    fn constants_are_annihilated() {
        let c = MultiPoly::constant(2, Complex64::new(3.5, -1.0));
        assert!(apply_diffop(&DiffOp::wave(2), &c).unwrap().is_zero());
    }

    #[test]
    fn iterated_laplacian() {
        // (z1^2 + z2^2)^2
        let r2 = MultiPoly::from_real_terms(2, &[(&[2, 0], 1.0), (&[0, 2], 1.0)]);
        let phi = r2.pow(2).unwrap();
        let lap = DiffOp::laplacian(2);
        assert_eq!(iterate_diffop(&lap, &phi, 0).unwrap(), phi);
        assert_eq!(iterate_diffop(&lap, &phi, 1).unwrap(), r2.scale(Complex64::new(16.0, 0.0)));
        assert_eq!(
            iterate_diffop(&lap, &phi, 2).unwrap(),
            MultiPoly::constant(2, Complex64::new(64.0, 0.0))
        );
    }

    #[test]
    fn third_derivative_of_fifth_power() {
        let p = DiffOp::partial(1, 0, 3);
        assert_eq!(iterate_diffop(&p, &poly1(&[(5, 1.0)]), 1).unwrap(), poly1(&[(2, 60.0)]));
    }

    #[test]
    fn quasi_homogeneity_is_validated() {
        // ξ1 ξ2 with N = (2, 1) has weighted order 3
        let s = MultiPoly::from_real_terms(2, &[(&[1, 1], 1.0)]);
        let q = DiffOp::quasi_homogeneous(s, vec![2, 1]).unwrap();
        assert_eq!(q.order(), 3);
        assert!(q.is_quasi_homogeneous());
        // heat symbol ξ1 − ξ2² is quasi-homogeneous of type (2,1), order 2
        let heat = MultiPoly::from_real_terms(2, &[(&[1, 0], 1.0), (&[0, 2], -1.0)]);
        let h = DiffOp::quasi_homogeneous(heat.clone(), vec![2, 1]).unwrap();
        assert_eq!(h.order(), 2);
        assert!(!DiffOp::new(heat.clone()).unwrap().is_homogeneous());
        assert!(DiffOp::quasi_homogeneous(heat, vec![1, 1]).is_err());
    }

    #[test]
    fn dimension_mismatch() {
        let phi = poly1(&[(2, 1.0)]);
        assert!(apply_diffop(&DiffOp::laplacian(2), &phi).is_err());
        assert!(iterate_diffop(&DiffOp::laplacian(2), &phi, 0).is_err());
    }

    #[test]
    fn second_order_from_matrix_doubles_off_diagonal() {
        let a = SquareMatrix::from_real(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let p = DiffOp::second_order(&a).unwrap();
        assert_eq!(p.symbol().coeff(&[1, 1]), Complex64::new(2.0, 0.0));
        assert_eq!(p.symbol().coeff(&[2, 0]), Complex64::new(2.0, 0.0));
        assert!(p.is_homogeneous());
    }
}
