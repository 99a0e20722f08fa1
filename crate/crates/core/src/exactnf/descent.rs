//! Möbius action on coefficients and descent of a relation to a subfield.

use rug::Rational;

use super::field::{FPoly, FieldElement, NumberField};
use super::ExactError;

/// `x ↦ (αx + β)/(γx + δ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Moebius {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
    pub delta: FieldElement,
}

impl Moebius {
    pub fn new(
        field: &NumberField,
        alpha: FieldElement,
        beta: FieldElement,
        gamma: FieldElement,
        delta: FieldElement,
    ) -> Result<Self, ExactError> {
        let det = field.sub(&field.mul(&alpha, &delta), &field.mul(&beta, &gamma));
        if det.is_zero() {
            return Err(ExactError::DegenerateMoebius);
        }
        Ok(Moebius { alpha, beta, gamma, delta })
    }

    pub fn identity(field: &NumberField) -> Self {
        Moebius { alpha: field.one(), beta: field.zero(), gamma: field.zero(), delta: field.one() }
    }

    pub fn apply(&self, field: &NumberField, c: &FieldElement) -> Result<FieldElement, ExactError> {
        let num = field.add(&field.mul(&self.alpha, c), &self.beta);
        let den = field.add(&field.mul(&self.gamma, c), &self.delta);
        field.div(&num, &den)
    }
}

/// Each coefficient `c` replaced by `w(c)`.
pub fn moebius_coeff_action(field: &NumberField, p: &[FieldElement], w: &Moebius) -> Result<FPoly, ExactError> {
    p.iter()
        .enumerate()
        .map(|(i, c)| w.apply(field, c).map_err(|_| ExactError::PoleHit { index: i }))
        .collect()
}

/// `K = Q[a]/(f_K)` inside `L`, with `a ↦ image`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubfieldEmbedding {
    pub subfield: NumberField,
    pub image: FieldElement,
    /// Powers `image^i`, `i < deg K`.
    basis: Vec<FieldElement>,
}

impl SubfieldEmbedding {
    /// Checks `f_K(image) = 0` in `L`.
    pub fn new(field: &NumberField, subfield: NumberField, image: FieldElement) -> Result<Self, ExactError> {
        if !field.eval_int_poly(subfield.poly(), &image).is_zero() {
            return Err(ExactError::NotAnEmbedding);
        }
        let mut basis = vec![field.one()];
        for i in 1..subfield.degree() {
            basis.push(field.mul(&basis[i - 1], &image));
        }
        Ok(SubfieldEmbedding { subfield, image, basis })
    }

    /// Coordinates of `c` in the power basis of `K`, if `c` lies in its image.
    pub fn preimage(&self, c: &FieldElement) -> Option<FieldElement> {
        // columns: coords of image^i; solve over Q
        let rows = c.numerators().len();
        let k = self.basis.len();
        let mut m: Vec<Vec<Rational>> = (0..rows)
            .map(|r| {
                let mut row: Vec<Rational> = self.basis.iter().map(|b| b.coords()[r].clone()).collect();
                row.push(c.coords()[r].clone());
                row
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..k {
            let Some(p) = (row..rows).find(|&i| m[i][col] != 0) else { continue };
            m.swap(row, p);
            let inv = Rational::from(1) / m[row][col].clone();
            for v in m[row].iter_mut() {
                *v *= &inv;
            }
            for i in 0..rows {
                if i != row && m[i][col] != 0 {
                    let f = m[i][col].clone();
                    for j in 0..=k {
                        let t = Rational::from(&f * &m[row][j]);
                        m[i][j] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if m[row..].iter().any(|r| r[k] != 0) {
            return None;
        }
        let mut q = vec![Rational::new(); k];
        for (i, &col) in pivots.iter().enumerate() {
            q[col] = m[i][k].clone();
        }
        self.subfield.element(&q).ok()
    }
}

/// Scalars with `k3·p̃3 + k2·p̃2 + kc·p̃c = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentScalars {
    pub k3: FieldElement,
    pub k2: FieldElement,
    pub kc: FieldElement,
}

/// Checks that all coefficients lie in the embedded subfield and returns a
/// nonzero relation among the three polynomials, normalized so that its first
/// nonzero scalar is 1.
pub fn descent_check(
    field: &NumberField,
    p3t: &[FieldElement],
    p2t: &[FieldElement],
    pct: &[FieldElement],
    embedding: Option<&SubfieldEmbedding>,
) -> Result<Option<DescentScalars>, ExactError> {
    let emb = embedding.ok_or(ExactError::NotAnEmbedding)?;
    let polys = [p3t, p2t, pct];
    if polys.iter().flat_map(|p| p.iter()).any(|c| emb.preimage(c).is_none()) {
        return Ok(None);
    }
    let rows = polys.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut m: Vec<Vec<FieldElement>> =
        (0..rows).map(|r| polys.iter().map(|p| p.get(r).cloned().unwrap_or_else(|| field.zero())).collect()).collect();
    // reduced row echelon form over L
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..3 {
        let Some(p) = (row..rows).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = field.inv(&m[row][col])?;
        m[row] = m[row].iter().map(|v| field.mul(v, &inv)).collect();
        for i in 0..rows {
            if i != row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..3 {
                    let t = field.mul(&f, &m[row][j]);
                    m[i][j] = field.sub(&m[i][j], &t);
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    let Some(free) = (0..3).find(|c| !pivots.contains(c)) else {
        return Ok(None);
    };
    let mut k = vec![field.zero(); 3];
    k[free] = field.one();
    for (i, &col) in pivots.iter().enumerate() {
        k[col] = field.neg(&m[i][free]);
    }
    if let Some(first) = k.iter().find(|v| !v.is_zero()).cloned() {
        let inv = field.inv(&first)?;
        k = k.iter().map(|v| field.mul(v, &inv)).collect();
    }
    let kc = k.pop().unwrap();
    let k2 = k.pop().unwrap();
    let k3 = k.pop().unwrap();
    Ok(Some(DescentScalars { k3, k2, kc }))
}
