use super::{Fraction, StructuredCML, StructuredElement};
use crate::error::{Error, Result};
use crate::catalog;
use crate::loops::{CayleyLoop, MAX_ORDER};

/// The finite subloop `⊕ᵢ Z(pᵢ^k) × C` as a Cayley table.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub level: u32,
    pub table: CayleyLoop,
    /// Image of each table index in the structured loop.
    pub embedding: Vec<StructuredElement>,
}

impl Truncation {
    /// Table index of a structured element, if it lies in the truncation.
    pub fn index_of(&self, q: &StructuredCML, a: &StructuredElement) -> Option<usize> {
        let mut index = 0usize;
        for (f, &p) in a.div.iter().zip(q.summands()) {
            let m = p.pow(self.level);
            if m % f.den() != 0 {
                return None;
            }
            index = index * m as usize + (f.num() * (m / f.den())) as usize;
        }
        Some(index * q.finite_part().order() + a.fin)
    }
}

fn radices(q: &StructuredCML, k: u32) -> Vec<u64> {
    q.summands().iter().map(|&p| p.pow(k)).collect()
}

fn decode(q: &StructuredCML, radices: &[u64], mut index: usize) -> StructuredElement {
    let n = q.finite_part().order();
    let fin = index % n;
    index /= n;
    let mut div = vec![Fraction::ZERO; radices.len()];
    for (i, &m) in radices.iter().enumerate().rev() {
        div[i] = Fraction::new((index as u64 % m) as i128, m);
        index /= m as usize;
    }
    StructuredElement { div, fin }
}

fn truncated_size(q: &StructuredCML, k: u32) -> Option<usize> {
    radices(q, k)
        .iter()
        .try_fold(q.finite_part().order(), |acc, &m| acc.checked_mul(usize::try_from(m).ok()?))
}

/// All elements with denominators dividing `pᵢ^k`, in table order.
pub(crate) fn elements_at(q: &StructuredCML, k: u32) -> Vec<StructuredElement> {
    let r = radices(q, k);
    let size = truncated_size(q, k).expect("truncation size fits in memory");
    (0..size).map(|i| decode(q, &r, i)).collect()
}

/// Materializes level `k` as `Z(p₁^k) × … × Z(p_r^k) × C`; indices are mixed
/// radix with the first summand most significant and the finite part last.
pub fn truncate(q: &StructuredCML, k: u32, cap: usize) -> Result<Truncation> {
    let cap = cap.min(MAX_ORDER);
    let size = truncated_size(q, k).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::CapExceeded { cap, partial: size });
    }
    let embedding = elements_at(q, k);
    let mut table = q.finite_part().clone();
    for &m in radices(q, k).iter().rev().filter(|&&m| m > 1) {
        table = CayleyLoop::direct_product(&catalog::cyclic(m as usize)?, &table);
    }
    Ok(Truncation {
        level: k,
        table,
        embedding,
    })
}
