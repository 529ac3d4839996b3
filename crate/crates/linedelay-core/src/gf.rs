//! GF(2^q) arithmetic and incremental rank tracking.
//!
//! Coded packets are represented by their coefficient vectors alone
//! (payload bytes never influence the transfer time), so the whole
//! packet-level simulation reduces to field arithmetic on short vectors
//! and rank bookkeeping per node.
//!
//! Multiplication uses log/antilog tables for q <= 8 and shift-and-reduce
//! above that; tables beyond 2^8 buy nothing at this scale.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::DetStream;

/// Default reduction polynomials, one published low-weight irreducible per
/// degree (index = q, entry includes the leading bit).
const DEFAULT_POLYS: [u32; 17] = [
    0,       // unused
    0x3,     // x + 1
    0x7,     // x^2 + x + 1
    0xB,     // x^3 + x + 1
    0x13,    // x^4 + x + 1
    0x25,    // x^5 + x^2 + 1
    0x43,    // x^6 + x + 1
    0x83,    // x^7 + x + 1
    0x11B,   // x^8 + x^4 + x^3 + x + 1
    0x203,   // x^9 + x + 1
    0x409,   // x^10 + x^3 + 1
    0x805,   // x^11 + x^2 + 1
    0x1009,  // x^12 + x^3 + 1
    0x201B,  // x^13 + x^4 + x^3 + x + 1
    0x4021,  // x^14 + x^5 + 1
    0x8003,  // x^15 + x + 1
    0x1002B, // x^16 + x^5 + x^3 + x + 1
];

/// Largest exponent for which multiplication goes through tables.
const TABLE_EXPONENT_MAX: u32 = 8;

/// A concrete representation of GF(2^q): exponent, reduction polynomial,
/// and (for small q) the log/antilog tables.
#[derive(Debug, Clone)]
pub struct FieldContext {
    exponent: u32,
    poly: u32,
    mask: u16,
    /// log[a] for a != 0, with respect to a fixed generator.
    log: Vec<u16>,
    /// exp table of doubled length so `exp[log a + log b]` needs no modulo.
    exp: Vec<u16>,
}

impl FieldContext {
    /// Field with the default reduction polynomial for `q`.
    pub fn new(exponent: u32) -> Result<Self> {
        if !(1..=16).contains(&exponent) {
            return Err(Error::FieldExponentOutOfRange { value: exponent });
        }
        Self::with_polynomial(exponent, DEFAULT_POLYS[exponent as usize])
    }

    /// Field with an explicit reduction polynomial (degree must equal `q`
    /// and the polynomial must be irreducible over GF(2)).
    pub fn with_polynomial(exponent: u32, poly: u32) -> Result<Self> {
        if !(1..=16).contains(&exponent) {
            return Err(Error::FieldExponentOutOfRange { value: exponent });
        }
        if !is_irreducible(poly, exponent) {
            return Err(Error::ReduciblePolynomial { poly, exponent });
        }
        let mask = ((1u32 << exponent) - 1) as u16;
        let mut ctx = FieldContext {
            exponent,
            poly,
            mask,
            log: Vec::new(),
            exp: Vec::new(),
        };
        if exponent <= TABLE_EXPONENT_MAX {
            ctx.build_tables();
        }
        Ok(ctx)
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn polynomial(&self) -> u32 {
        self.poly
    }

    /// Number of field elements, `2^q`.
    pub fn order(&self) -> u32 {
        1u32 << self.exponent
    }

    /// Bit mask for drawing uniform elements.
    pub fn mask(&self) -> u16 {
        self.mask
    }

    fn build_tables(&mut self) {
        let order = self.order() as usize;
        let group = order - 1;
        if group == 1 {
            // GF(2): the multiplicative group is trivial.
            self.log = vec![0, 0];
            self.exp = vec![1, 1];
            return;
        }
        // Find a generator of the multiplicative group by brute force; the
        // reduction polynomial need not be primitive, so x itself may fall
        // short.
        'candidates: for g in 2..order as u32 {
            let mut log = vec![0u16; order];
            let mut exp = vec![0u16; 2 * group];
            let mut seen = vec![false; order];
            let mut acc: u16 = 1;
            for k in 0..group {
                if seen[acc as usize] {
                    continue 'candidates; // order of g divides group strictly
                }
                seen[acc as usize] = true;
                exp[k] = acc;
                exp[k + group] = acc;
                log[acc as usize] = k as u16;
                acc = shift_reduce_mul(acc, g as u16, self.poly, self.exponent);
            }
            if acc == 1 {
                self.log = log;
                self.exp = exp;
                return;
            }
        }
        unreachable!("every finite field has a generator");
    }

    /// Product of two field elements.
    #[inline]
    pub fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            return 0;
        }
        if self.log.is_empty() {
            shift_reduce_mul(a, b, self.poly, self.exponent)
        } else {
            let idx = self.log[a as usize] as usize + self.log[b as usize] as usize;
            self.exp[idx]
        }
    }

    /// Multiplicative inverse; zero is rejected.
    pub fn inv(&self, a: u16) -> Result<u16> {
        if a == 0 {
            return Err(Error::ZeroInverse);
        }
        if !self.log.is_empty() {
            let group = self.order() as usize - 1;
            let l = self.log[a as usize] as usize;
            return Ok(self.exp[(group - l) % group]);
        }
        // a^(2^q - 2) by square-and-multiply.
        let mut result: u16 = 1;
        let mut base = a;
        let mut e = (1u32 << self.exponent) - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        Ok(result)
    }
}

/// Russian-peasant product with inline reduction; everything stays within
/// q+1 bits.
#[inline]
fn shift_reduce_mul(a: u16, b: u16, poly: u32, q: u32) -> u16 {
    let mut acc: u32 = 0;
    let mut a = u32::from(a);
    let mut b = u32::from(b);
    let high = 1u32 << q;
    for _ in 0..q {
        if b & 1 != 0 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a & high != 0 {
            a ^= poly;
        }
    }
    acc as u16
}

/// Trial division by every monic polynomial of degree 1..=q/2.
fn is_irreducible(poly: u32, q: u32) -> bool {
    if q == 0 || q > 16 || poly >> q != 1 {
        return false; // wrong degree
    }
    for d in 1..=q / 2 {
        for g in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly, g) == 0 {
                return false;
            }
        }
    }
    true
}

/// Remainder of carry-less division of `a` by `b` over GF(2).
fn poly_rem(mut a: u32, b: u32) -> u32 {
    let db = 31 - b.leading_zeros();
    while a != 0 {
        let da = 31 - a.leading_zeros();
        if da < db {
            break;
        }
        a ^= b << (da - db);
    }
    a
}

/// Coefficients of one coded packet with respect to the `n` source packets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoefficientVector {
    pub entries: Vec<u16>,
}

impl CoefficientVector {
    pub fn new(entries: Vec<u16>) -> Self {
        CoefficientVector { entries }
    }

    /// The k-th unit vector of dimension n.
    pub fn unit(n: usize, k: usize) -> Self {
        let mut entries = vec![0; n];
        entries[k] = 1;
        CoefficientVector { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&e| e == 0)
    }
}

/// Row-reduced basis of everything a node has received; answers "is this
/// vector innovative?" in one elimination pass.
#[derive(Debug, Clone)]
pub struct RankTracker {
    dim: usize,
    /// Rows in reduced echelon form, sorted by pivot column; `pivots[r]`
    /// is the pivot column of `rows[r]` and each pivot entry equals 1.
    rows: Vec<Vec<u16>>,
    pivots: Vec<usize>,
}

impl RankTracker {
    /// Empty tracker over an n-dimensional coefficient space.
    pub fn new(dim: usize) -> Self {
        RankTracker {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Tracker already spanning the full space (a source node's view).
    pub fn full(dim: usize) -> Self {
        RankTracker {
            dim,
            rows: (0..dim).map(|k| CoefficientVector::unit(dim, k).entries).collect(),
            pivots: (0..dim).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_complete(&self) -> bool {
        self.rank() == self.dim
    }

    /// Basis rows (reduced echelon form).
    pub fn rows(&self) -> &[Vec<u16>] {
        &self.rows
    }

    /// Insert a vector; returns true iff it was innovative (outside the
    /// current span), in which case the rank grows by exactly one.
    pub fn insert(&mut self, ctx: &FieldContext, v: &CoefficientVector) -> Result<bool> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        let mut work = v.entries.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let factor = work[p];
            if factor != 0 {
                for (w, &r) in work.iter_mut().zip(row.iter()) {
                    *w ^= ctx.mul(factor, r);
                }
            }
        }
        let Some(pivot) = work.iter().position(|&e| e != 0) else {
            return Ok(false); // already in the span
        };
        // Normalize the pivot to 1 and clear its column in existing rows.
        let inv = ctx.inv(work[pivot])?;
        for w in work.iter_mut() {
            *w = ctx.mul(inv, *w);
        }
        for row in self.rows.iter_mut() {
            let factor = row[pivot];
            if factor != 0 {
                for (r, &w) in row.iter_mut().zip(work.iter()) {
                    *r ^= ctx.mul(factor, w);
                }
            }
        }
        let at = self.pivots.partition_point(|&p| p < pivot);
        self.rows.insert(at, work);
        self.pivots.insert(at, pivot);
        Ok(true)
    }

    /// True iff `v` lies inside the tracked span (no mutation).
    pub fn contains(&self, ctx: &FieldContext, v: &CoefficientVector) -> bool {
        let mut work = v.entries.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let factor = work[p];
            if factor != 0 {
                for (w, &r) in work.iter_mut().zip(row.iter()) {
                    *w ^= ctx.mul(factor, r);
                }
            }
        }
        work.iter().all(|&e| e == 0)
    }
}

/// Uniform random linear combination of the stored vectors, coefficients
/// drawn independently from the whole field (zero included). The result is
/// uniform over the span of `stored`, whatever spanning set is supplied.
pub fn random_combination(
    ctx: &FieldContext,
    stored: &[Vec<u16>],
    stream: &mut DetStream,
) -> Result<CoefficientVector> {
    let Some(first) = stored.first() else {
        return Err(Error::EmptyStore);
    };
    let mut out = vec![0u16; first.len()];
    for row in stored {
        let c = stream.next_element(ctx.mask());
        if c == 0 {
            continue;
        }
        for (o, &r) in out.iter_mut().zip(row.iter()) {
            if r != 0 {
                *o ^= ctx.mul(c, r);
            }
        }
    }
    Ok(CoefficientVector::new(out))
}
