//! Finite fields and the transversal designs they generate.
//!
//! Elements of `GF(p^k)` are the integers `0..p^k`, read as polynomial
//! coefficient vectors base `p` (digit `i` is the coefficient of `x^i`).
//! For `k > 1` arithmetic is modulo the lexicographically least monic
//! irreducible polynomial of degree `k`, found by search; fixing that choice
//! makes every construction here reproducible byte for byte.

use crate::design::{Block, DesignKind, GroupedDesign, Provenance};
use crate::{Error, Result};

/// Factors `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q % p == 0 {
            let mut rest = q;
            let mut k = 0;
            while rest % p == 0 {
                rest /= p;
                k += 1;
            }
            return (rest == 1).then_some((p, k));
        }
        p += 1;
    }
    Some((q, 1))
}

/// The field `GF(p^k)` with elements encoded as integers `0..q`.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    k: u32,
    q: u32,
    /// Coefficients of the monic modulus, constant term first, length `k+1`
    /// (for `k = 1` this is `[0, 1]`, i.e. reduction is plain mod `p`).
    modulus: Vec<u32>,
}

/// Digits of `n` base `p`, least significant first, padded to `len`.
fn digits(mut n: u32, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0; len];
    for slot in out.iter_mut() {
        *slot = n % p;
        n /= p;
    }
    out
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Polynomial remainder of `a` by monic `m`, coefficients mod `p`.
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let deg_m = m.len() - 1;
    while a.len() > deg_m {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - deg_m;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = i + shift;
                a[idx] = (a[idx] + p - (lead * mc) % p) % p;
            }
        }
        a.pop();
    }
    a
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

/// True when the monic polynomial `m` (constant first) has no monic divisor
/// of degree between 1 and deg(m)/2: trial division over all candidates.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = m.len() - 1;
    for d in 1..=k / 2 {
        // All monic polynomials of degree d.
        for n in 0..p.pow(d as u32) {
            let mut cand = digits(n, p, d);
            cand.push(1);
            let rem = poly_rem(m.to_vec(), &cand, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FiniteField {
    /// Builds `GF(q)`; fails when `q` is not a prime power or exceeds 1024.
    pub fn new(q: u32) -> Result<Self> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::Precondition(format!("{q} is not a prime power")))?;
        if q > 1024 {
            return Err(Error::Precondition(format!("field order {q} exceeds 1024")));
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            // Candidates x^k + c_{k-1} x^{k-1} + ... + c_0 in ascending
            // lexicographic order of (c_{k-1}, ..., c_0), which is ascending
            // order of the base-p integer n encoding those digits.
            (0..q)
                .map(|n| {
                    let mut m = digits(n, p, k as usize);
                    m.push(1);
                    m
                })
                .find(|m| is_irreducible(m, p))
                .expect("an irreducible polynomial of every degree exists")
        };
        Ok(FiniteField { p, k, q, modulus })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (
            digits(a, self.p, self.k as usize),
            digits(b, self.p, self.k as usize),
        );
        let sum: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        undigits(&sum, self.p)
    }

    pub fn neg(&self, a: u32) -> u32 {
        let da = digits(a, self.p, self.k as usize);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        undigits(&neg, self.p)
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        let (da, db) = (
            digits(a, self.p, self.k as usize),
            digits(b, self.p, self.k as usize),
        );
        let prod = poly_rem(poly_mul(&da, &db, self.p), &self.modulus, self.p);
        undigits(&prod, self.p)
    }

    /// Multiplicative inverse of a nonzero element, by scan (field orders
    /// here are small).
    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::Precondition("0 has no inverse".into()));
        }
        (1..self.q)
            .find(|&b| self.mul(a, b) == 1)
            .ok_or_else(|| Error::Invalid(format!("no inverse for {a}: not a field")))
    }
}

/// A transversal design TD(k, q) from the field `GF(q)`.
///
/// Groups are `[i*q, (i+1)*q)` for `i < k`.  For each `(x, y)` in
/// `GF(q)^2`, in `x*q + y` order, the block is
/// `{x,  q + y,  (i+1)*q + (alpha_i * x + y)}` for `i = 1..k-2`, with
/// `alpha_i` the field element encoded by the integer `i`.  Group 0 carries
/// `x` and group 1 carries `y`; downstream constructions rely on that
/// layout.
pub fn td(k: u32, q: u32) -> Result<GroupedDesign> {
    if !(3..=q + 1).contains(&k) {
        return Err(Error::Precondition(format!(
            "td requires 3 <= k <= q + 1, got k = {k}, q = {q}"
        )));
    }
    let field = FiniteField::new(q)?;
    let v = k * q;
    let groups: Vec<Vec<u32>> = (0..k).map(|i| (i * q..(i + 1) * q).collect()).collect();
    let mut blocks = Vec::with_capacity((q * q) as usize);
    for x in 0..q {
        for y in 0..q {
            let mut points = Vec::with_capacity(k as usize);
            points.push(x);
            points.push(q + y);
            for i in 1..k - 1 {
                let z = field.add(field.mul(i, x), y);
                points.push((i + 1) * q + z);
            }
            blocks.push(Block::from_sorted(points)?);
        }
    }
    GroupedDesign::new(
        v,
        DesignKind::Td,
        k,
        groups,
        None,
        None,
        blocks,
        Provenance::field("td", &[("k", k as u64), ("q", q as u64)]),
    )
}

/// A resolvable transversal design RTD(k, q): TD(k+1, q) with its last group
/// deleted.  The deleted coordinate indexes the `q` parallel classes; class
/// `c` holds the `q` blocks whose removed point encoded `c`.
pub fn rtd(k: u32, q: u32) -> Result<GroupedDesign> {
    let full = td(k + 1, q)?;
    let mut classes: Vec<Vec<u32>> = vec![Vec::with_capacity(q as usize); q as usize];
    let mut blocks = Vec::with_capacity(full.blocks().len());
    for (bi, block) in full.blocks().iter().enumerate() {
        let mut points = block.points().to_vec();
        // Points are sorted, so the last one lies in the last group.
        let removed = points.pop().unwrap();
        classes[(removed - k * q) as usize].push(bi as u32);
        blocks.push(Block::from_sorted(points)?);
    }
    GroupedDesign::new(
        k * q,
        DesignKind::Rgdd,
        k,
        full.groups()[..k as usize].to_vec(),
        None,
        Some(classes),
        blocks,
        Provenance::field("rtd", &[("k", k as u64), ("q", q as u64)]),
    )
}

/// The product TD(k, q_a * q_b) of two transversal designs with the same
/// block size.  Within group `i`, the point pair `(s, t)` — `s` from the
/// first design, `t` from the second — is encoded `s * q_b + t`.
pub fn macneish(a: &GroupedDesign, b: &GroupedDesign) -> Result<GroupedDesign> {
    for (label, d) in [("first", a), ("second", b)] {
        if d.kind() != DesignKind::Td {
            return Err(Error::Precondition(format!(
                "{label} operand is a {}, not a TD",
                d.kind()
            )));
        }
    }
    if a.block_size() != b.block_size() {
        return Err(Error::Precondition(format!(
            "block sizes differ: {} vs {}",
            a.block_size(),
            b.block_size()
        )));
    }
    let k = a.block_size();
    let qa = a.groups()[0].len() as u32;
    let qb = b.groups()[0].len() as u32;
    let q = qa * qb;
    let groups: Vec<Vec<u32>> = (0..k).map(|i| (i * q..(i + 1) * q).collect()).collect();
    let mut blocks = Vec::with_capacity(a.blocks().len() * b.blocks().len());
    for block_a in a.blocks() {
        for block_b in b.blocks() {
            // Sorted points visit groups in index order in both operands.
            let points: Vec<u32> = block_a
                .points()
                .iter()
                .zip(block_b.points())
                .enumerate()
                .map(|(i, (&pa, &pb))| {
                    let i32u = i as u32;
                    let (s, t) = (pa - i32u * qa, pb - i32u * qb);
                    i32u * q + s * qb + t
                })
                .collect();
            blocks.push(Block::from_sorted(points)?);
        }
    }
    GroupedDesign::new(
        k * q,
        DesignKind::Td,
        k,
        groups,
        None,
        None,
        blocks,
        Provenance::theorem("macneish", &[], vec![a.provenance().clone(), b.provenance().clone()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::TypeSignature;
    use crate::verify::verify;

    #[test]
    fn prime_power_detection() {
        assert_eq!(prime_power(2), Some((2, 1)));
        assert_eq!(prime_power(27), Some((3, 3)));
        assert_eq!(prime_power(1024), Some((2, 10)));
        assert_eq!(prime_power(13), Some((13, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(0), None);
    }

    #[test]
    fn gf4_modulus_is_xx_x_1() {
        let f = FiniteField::new(4).unwrap();
        // x^2 + x + 1, constant term first.
        assert_eq!(f.modulus(), &[1, 1, 1]);
        assert!(FiniteField::new(12).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        // The exhaustive q <= 27 sweep lives in the property suite; spot
        // check two extension fields here.
        for q in [8u32, 9] {
            let f = FiniteField::new(q).unwrap();
            for a in 0..q {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                    }
                }
            }
        }
    }

    #[test]
    fn td_constructions_verify() {
        let d = td(4, 3).unwrap();
        assert_eq!(d.blocks().len(), 9);
        assert_eq!(d.signature(), TypeSignature::parse("3^4").unwrap());
        assert!(verify(&d).passed);

        let d = td(5, 9).unwrap();
        assert_eq!(d.blocks().len(), 81);
        assert!(verify(&d).passed);

        let d = td(4, 13).unwrap();
        assert_eq!(d.blocks().len(), 169);
        assert!(verify(&d).passed);

        assert!(td(4, 2).is_err());
        assert!(td(2, 5).is_err());
        assert!(td(4, 12).is_err());
    }

    #[test]
    fn rtd_constructions_verify() {
        let d = rtd(4, 9).unwrap();
        assert_eq!(d.blocks().len(), 81);
        assert_eq!(d.resolution().unwrap().len(), 9);
        let report = verify(&d);
        assert!(report.passed, "{}", report.summary());

        let d = rtd(5, 7).unwrap();
        assert_eq!(d.blocks().len(), 49);
        assert_eq!(d.resolution().unwrap().len(), 7);
        assert!(verify(&d).passed);

        let d = rtd(6, 7).unwrap();
        assert!(verify(&d).passed);

        // RTD(4,3) would need TD(5,3) with k = q + 2: out of range.
        assert!(rtd(4, 3).is_err());
    }

    #[test]
    fn macneish_product_verifies() {
        let a = td(4, 3).unwrap();
        let b = td(4, 4).unwrap();
        let prod = macneish(&a, &b).unwrap();
        assert_eq!(prod.signature(), TypeSignature::parse("12^4").unwrap());
        assert_eq!(prod.blocks().len(), 144);
        assert!(verify(&prod).passed);

        let sq = macneish(&a, &a).unwrap();
        assert_eq!(sq.signature(), TypeSignature::parse("9^4").unwrap());
        assert!(verify(&sq).passed);

        let five = td(5, 7).unwrap();
        assert!(macneish(&a, &five).is_err());
        let gdd = crate::appendix::expand_entry(
            crate::appendix::Catalogue::builtin()
                .find_by_name("9^4 18^1 15^1")
                .unwrap(),
        )
        .unwrap();
        assert!(macneish(&a, &gdd).is_err());
    }
}
