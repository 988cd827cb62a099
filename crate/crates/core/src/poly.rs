//! Univariate polynomials over the rationals: Sturm chains, square-free parts,
//! exact real root isolation and rational root extraction.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rational::{lcm_of_denominators, simplest_in_closed, Q};

/// Coefficients in ascending degree; the zero polynomial is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    coeffs: Vec<Q>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Q) -> Self {
        Poly::new(vec![c])
    }

    /// `a*x - b`.
    pub fn linear(a: Q, b: Q) -> Self {
        Poly::new(vec![-b, a])
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs
            .iter()
            .rev()
            .fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Q::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Q::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
                        - other.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
                })
                .collect(),
        )
    }

    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        let dd = divisor.degree().unwrap();
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, d) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn square_free(&self) -> Poly {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    /// Primitive integer polynomial on the same ray with positive leading coefficient
    /// (ascending integer coefficients).
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let l = lcm_of_denominators(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * Q::from_integer(l.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        let sign = if ints.last().unwrap().is_negative() { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|x| x / &g * &sign).collect()
    }

    pub fn from_integers(c: &[BigInt]) -> Poly {
        Poly::new(c.iter().map(|x| Q::from_integer(x.clone())).collect())
    }

    pub fn sturm_chain(&self) -> Vec<Poly> {
        let mut chain = vec![self.clone(), self.derivative()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[n - 2].div_rem(&chain[n - 1]).1;
            if r.is_zero() {
                break;
            }
            chain.push(r.scale(&-Q::one()));
        }
        chain
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*t"),
                _ => format!("({c})*t^{i}"),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

fn sign_changes(chain: &[Poly], x: &Q) -> usize {
    let mut last = 0i8;
    let mut changes = 0;
    for p in chain {
        let v = p.eval(x);
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots in the half-open interval `(a, b]`.
pub fn count_roots(chain: &[Poly], a: &Q, b: &Q) -> usize {
    sign_changes(chain, a) - sign_changes(chain, b)
}

/// An isolating interval `(lo, hi)` containing exactly one root of the polynomial,
/// neither endpoint being a root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub lo: Q,
    pub hi: Q,
}

/// Isolates every real root of a square-free polynomial in the open interval
/// `(a, b)` where neither endpoint is a root, refining each interval to width at
/// most `width`.
pub fn isolate_open(p: &Poly, a: &Q, b: &Q, width: &Q) -> Vec<IsolatedRoot> {
    assert!(!p.is_zero());
    assert!(!p.eval(a).is_zero() && !p.eval(b).is_zero(), "endpoints must not be roots");
    let chain = p.sturm_chain();
    let mut out = Vec::new();
    let mut stack = vec![(a.clone(), b.clone())];
    let two = Q::from_integer(BigInt::from(2));
    while let Some((lo, hi)) = stack.pop() {
        let k = count_roots(&chain, &lo, &hi);
        if k == 0 {
            continue;
        }
        if k == 1 && &(&hi - &lo) <= width {
            out.push(IsolatedRoot { lo, hi });
            continue;
        }
        let mut mid = (&lo + &hi) / &two;
        if p.eval(&mid).is_zero() {
            // rational root hit exactly: nudge the split point off it
            let quarter = (&hi - &lo) / Q::from_integer(BigInt::from(4));
            mid = &lo + &quarter;
            if p.eval(&mid).is_zero() {
                mid = &hi - &quarter;
            }
        }
        stack.push((mid.clone(), hi));
        stack.push((lo, mid));
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out
}

/// Splits off rational roots lying in the closed interval `[a, b]`.
/// Returns `(rational roots sorted, cofactor with those roots divided out)`.
pub fn rational_roots_in(p: &Poly, a: &Q, b: &Q) -> (Vec<Q>, Poly) {
    let sf = p.square_free();
    let ints = sf.primitive_integer();
    let lead = ints.last().cloned().unwrap_or_else(BigInt::one).abs();
    let mut roots = Vec::new();
    for end in [a, b] {
        if sf.eval(end).is_zero() && !roots.contains(end) {
            roots.push(end.clone());
        }
    }
    // denominators of rational roots divide the leading coefficient; two distinct
    // such rationals differ by at least 1/lead^2
    let lead_q = Q::from_integer(lead);
    let width = (&lead_q * &lead_q).recip() / Q::from_integer(BigInt::from(2));
    let (lo, hi) = nudge_off_roots(&sf, a, b);
    if lo < hi {
        for iso in isolate_open(&sf, &lo, &hi, &width) {
            let cand = simplest_in_closed(&iso.lo, &iso.hi);
            if sf.eval(&cand).is_zero() {
                roots.push(cand);
            }
        }
    }
    roots.sort();
    roots.dedup();
    let mut cof = sf;
    for r in &roots {
        cof = cof.div_rem(&Poly::linear(Q::one(), r.clone())).0;
    }
    (roots, cof)
}

/// Shrinks `[a, b]` slightly inward when an endpoint is a root, so the open
/// interval still contains every interior root.
fn nudge_off_roots(p: &Poly, a: &Q, b: &Q) -> (Q, Q) {
    let chain = p.sturm_chain();
    let mut lo = a.clone();
    let mut hi = b.clone();
    if p.eval(&lo).is_zero() || p.eval(&hi).is_zero() {
        let mut eps = (b - a) / Q::from_integer(BigInt::from(4));
        loop {
            let l = if p.eval(a).is_zero() { a + &eps } else { a.clone() };
            let h = if p.eval(b).is_zero() { b - &eps } else { b.clone() };
            let interior_full = count_roots(&chain, a, b) - usize::from(p.eval(b).is_zero());
            if !p.eval(&l).is_zero() && !p.eval(&h).is_zero() && l < h && count_roots(&chain, &l, &h) == interior_full {
                lo = l;
                hi = h;
                break;
            }
            eps /= Q::from_integer(BigInt::from(2));
        }
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn p(c: &[i64]) -> Poly {
        Poly::new(c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn division_and_gcd() {
        // (x-1)(x+2) = x^2 + x - 2
        let f = p(&[-2, 1, 1]);
        let (qt, r) = f.div_rem(&p(&[-1, 1]));
        assert_eq!(qt, p(&[2, 1]));
        assert!(r.is_zero());
        let h = f.mul(&p(&[-1, 1]));
        let g = h.gcd(&h.derivative().mul(&p(&[3])));
        assert_eq!(g, p(&[-1, 1]));
    }

    #[test]
    fn square_free_part() {
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1]));
        assert_eq!(f.square_free().monic(), p(&[-2, 1, 1]));
    }

    #[test]
    fn sturm_counts_sqrt_two() {
        let f = p(&[-2, 0, 1]);
        let chain = f.sturm_chain();
        assert_eq!(count_roots(&chain, &qi(-2), &qi(2)), 2);
        assert_eq!(count_roots(&chain, &qi(0), &qi(2)), 1);
        let iso = isolate_open(&f, &qi(0), &qi(2), &q(1, 100));
        assert_eq!(iso.len(), 1);
        assert!(&iso[0].lo * &iso[0].lo < qi(2) && &iso[0].hi * &iso[0].hi > qi(2));
    }

    #[test]
    fn rational_roots_detected() {
        // (3x-1)(x^2-2)
        let f = p(&[-1, 3]).mul(&p(&[-2, 0, 1]));
        let (roots, cof) = rational_roots_in(&f, &qi(0), &qi(2));
        assert_eq!(roots, vec![q(1, 3)]);
        assert_eq!(cof.monic(), p(&[-2, 0, 1]));
        // endpoint root
        let (roots, _) = rational_roots_in(&p(&[0, 1]), &qi(0), &qi(1));
        assert_eq!(roots, vec![qi(0)]);
    }

    #[test]
    fn primitive_integer_form() {
        let f = Poly::new(vec![q(-14, 25), q(36, 25), q(9, 25)]);
        let ints: Vec<i64> = f.primitive_integer().iter().map(|x| x.try_into().unwrap()).collect();
        assert_eq!(ints, vec![-14, 36, 9]);
    }
}
