//! Finite time domains realised by index tables: a group G, a subgroup H ≤ G
//! with dual Ĝ/H^⊥, or a quotient G/H with dual H^⊥.
//!
//! Every time point carries an ambient label in G and every frequency an
//! ambient label in Ĝ ≅ G. For H the frequency labels are the transversal
//! K_{H^⊥}; for G/H the time labels are the transversal K_H. With these labels
//! the embeddings Φ and Ψ into G×Ĝ are the identity on labels.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lca::{self, Element, FiniteAbelianGroup, Subgroup};
use crate::rational::Rational;

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Full,
    Subgroup,
    Quotient,
}

#[derive(Debug)]
pub struct Domain {
    ambient: FiniteAbelianGroup,
    kind: DomainKind,
    /// H for subgroup and quotient domains.
    h: Option<Subgroup>,
    time: Vec<usize>,
    freq: Vec<usize>,
    time_slot: Vec<u32>,
    freq_slot: Vec<u32>,
    time_add: Vec<u32>,
    time_neg: Vec<u32>,
    freq_add: Vec<u32>,
    freq_neg: Vec<u32>,
    /// phase[w * n + t]: numerator of the pairing freq[w](time[t]) over `modulus`.
    phase: Vec<u32>,
    modulus: usize,
    roots: Vec<Complex64>,
}

impl Domain {
    pub fn full(group: &FiniteAbelianGroup) -> Arc<Domain> {
        let n = group.cardinality();
        let all: Vec<usize> = (0..n).collect();
        let slots: Vec<u32> = (0..n as u32).collect();
        Arc::new(Self::build(
            group.clone(),
            DomainKind::Full,
            None,
            all.clone(),
            all,
            slots.clone(),
            slots,
        ))
    }

    /// The domain H with dual Ĥ ≅ Ĝ/H^⊥ labelled by K_{H^⊥}.
    pub fn subgroup(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Arc<Domain>> {
        if h.ambient() != group {
            return Err(Error::invalid("H must be a subgroup of G"));
        }
        let n = group.cardinality();
        let time: Vec<usize> = h.member_indices().to_vec();
        let mut time_slot = vec![NONE; n];
        for (s, &x) in time.iter().enumerate() {
            time_slot[x] = s as u32;
        }
        let h_perp = lca::annihilator(group, h)?;
        let rep = lca::coset_representatives(group, &h_perp);
        let freq: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
        let mut rep_slot = vec![NONE; n];
        for (s, &w) in freq.iter().enumerate() {
            rep_slot[w] = s as u32;
        }
        let freq_slot: Vec<u32> = (0..n).map(|i| rep_slot[rep[i]]).collect();
        Ok(Arc::new(Self::build(
            group.clone(),
            DomainKind::Subgroup,
            Some(h.clone()),
            time,
            freq,
            time_slot,
            freq_slot,
        )))
    }

    /// The domain G/H labelled by K_H, with dual H^⊥.
    pub fn quotient(group: &FiniteAbelianGroup, h: &Subgroup) -> Result<Arc<Domain>> {
        if h.ambient() != group {
            return Err(Error::invalid("H must be a subgroup of G"));
        }
        let n = group.cardinality();
        let rep = lca::coset_representatives(group, h);
        let time: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
        let mut rep_slot = vec![NONE; n];
        for (s, &x) in time.iter().enumerate() {
            rep_slot[x] = s as u32;
        }
        let time_slot: Vec<u32> = (0..n).map(|i| rep_slot[rep[i]]).collect();
        let h_perp = lca::annihilator(group, h)?;
        let freq: Vec<usize> = h_perp.member_indices().to_vec();
        let mut freq_slot = vec![NONE; n];
        for (s, &w) in freq.iter().enumerate() {
            freq_slot[w] = s as u32;
        }
        Ok(Arc::new(Self::build(
            group.clone(),
            DomainKind::Quotient,
            Some(h.clone()),
            time,
            freq,
            time_slot,
            freq_slot,
        )))
    }

    fn build(
        ambient: FiniteAbelianGroup,
        kind: DomainKind,
        h: Option<Subgroup>,
        time: Vec<usize>,
        freq: Vec<usize>,
        time_slot: Vec<u32>,
        freq_slot: Vec<u32>,
    ) -> Domain {
        let n = time.len();
        assert_eq!(
            n,
            freq.len(),
            "a finite domain and its dual have equal size"
        );
        let modulus = ambient.exponent();
        let t_el: Vec<Element> = time.iter().map(|&i| ambient.element(i)).collect();
        let w_el: Vec<Element> = freq.iter().map(|&i| ambient.element(i)).collect();
        let mut time_add = vec![0u32; n * n];
        let mut freq_add = vec![0u32; n * n];
        let mut phase = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                time_add[a * n + b] = time_slot[ambient.index_of(&ambient.add(&t_el[a], &t_el[b]))];
                freq_add[a * n + b] = freq_slot[ambient.index_of(&ambient.add(&w_el[a], &w_el[b]))];
                phase[a * n + b] = ambient.pairing_phase(&w_el[a], &t_el[b]) as u32;
            }
        }
        let time_neg = (0..n)
            .map(|a| time_slot[ambient.index_of(&ambient.neg(&t_el[a]))])
            .collect();
        let freq_neg = (0..n)
            .map(|a| freq_slot[ambient.index_of(&ambient.neg(&w_el[a]))])
            .collect();
        let roots = (0..modulus).map(|k| lca::unit_root(k, modulus)).collect();
        Domain {
            ambient,
            kind,
            h,
            time,
            freq,
            time_slot,
            freq_slot,
            time_add,
            time_neg,
            freq_add,
            freq_neg,
            phase,
            modulus,
            roots,
        }
    }

    pub fn ambient(&self) -> &FiniteAbelianGroup {
        &self.ambient
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    pub fn h(&self) -> Option<&Subgroup> {
        self.h.as_ref()
    }

    /// Number of time points (equal to the number of frequencies).
    pub fn n(&self) -> usize {
        self.time.len()
    }

    /// Number of phase-space points n².
    pub fn phase_len(&self) -> usize {
        self.n() * self.n()
    }

    pub fn time_label(&self, t: usize) -> Element {
        self.ambient.element(self.time[t])
    }

    pub fn freq_label(&self, w: usize) -> Element {
        self.ambient.element(self.freq[w])
    }

    pub fn time_ambient_index(&self, t: usize) -> usize {
        self.time[t]
    }

    pub fn freq_ambient_index(&self, w: usize) -> usize {
        self.freq[w]
    }

    /// Slot of an ambient time label (reduced to its representative on quotients).
    pub fn time_slot(&self, ambient_index: usize) -> Option<usize> {
        let s = self.time_slot[ambient_index];
        (s != NONE).then_some(s as usize)
    }

    pub fn freq_slot(&self, ambient_index: usize) -> Option<usize> {
        let s = self.freq_slot[ambient_index];
        (s != NONE).then_some(s as usize)
    }

    pub fn point(&self, t: usize, w: usize) -> usize {
        t * self.n() + w
    }

    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.n(), p % self.n())
    }

    pub fn point_from_labels(&self, x: &[usize], omega: &[usize]) -> Option<usize> {
        if !self.ambient.is_element(x) || !self.ambient.is_element(omega) {
            return None;
        }
        let t = self.time_slot(self.ambient.index_of(x))?;
        let w = self.freq_slot(self.ambient.index_of(omega))?;
        Some(self.point(t, w))
    }

    pub fn point_labels(&self, p: usize) -> (Element, Element) {
        let (t, w) = self.split(p);
        (self.time_label(t), self.freq_label(w))
    }

    /// Index of the same labels in the phase space of `target`, if present there.
    pub fn embed_point(&self, p: usize, target: &Domain) -> Option<usize> {
        let (t, w) = self.split(p);
        let tt = target.time_slot(self.time[t])?;
        let ww = target.freq_slot(self.freq[w])?;
        // Labels must be carried over unchanged, not merely up to a coset.
        if target.time[tt] != self.time[t] || target.freq[ww] != self.freq[w] {
            return None;
        }
        Some(target.point(tt, ww))
    }

    pub fn time_add(&self, a: usize, b: usize) -> usize {
        self.time_add[a * self.n() + b] as usize
    }

    pub fn time_neg(&self, a: usize) -> usize {
        self.time_neg[a] as usize
    }

    pub fn freq_add(&self, a: usize, b: usize) -> usize {
        self.freq_add[a * self.n() + b] as usize
    }

    pub fn freq_neg(&self, a: usize) -> usize {
        self.freq_neg[a] as usize
    }

    pub fn phase_add(&self, p: usize, q: usize) -> usize {
        let (t1, w1) = self.split(p);
        let (t2, w2) = self.split(q);
        self.point(self.time_add(t1, t2), self.freq_add(w1, w2))
    }

    pub fn phase_neg(&self, p: usize) -> usize {
        let (t, w) = self.split(p);
        self.point(self.time_neg(t), self.freq_neg(w))
    }

    pub fn modulus(&self) -> usize {
        self.modulus
    }

    /// Numerator of ω(t) over the modulus.
    pub fn pairing(&self, w: usize, t: usize) -> usize {
        self.phase[w * self.n() + t] as usize
    }

    pub fn root(&self, k: usize) -> Complex64 {
        self.roots[k % self.modulus]
    }

    /// Phase of c(χ₁,χ₂) = conj(ω₂(x₁)).
    pub fn cocycle_phase(&self, p: usize, q: usize) -> usize {
        let (t1, _) = self.split(p);
        let (_, w2) = self.split(q);
        (self.modulus - self.pairing(w2, t1)) % self.modulus
    }

    pub fn cocycle(&self, p: usize, q: usize) -> Complex64 {
        self.root(self.cocycle_phase(p, q))
    }

    /// Phase of c_s(χ₁,χ₂) = conj(ω₂(x₁))·ω₁(x₂).
    pub fn symplectic_phase(&self, p: usize, q: usize) -> usize {
        let (t1, w1) = self.split(p);
        let (t2, w2) = self.split(q);
        (self.pairing(w1, t2) + self.modulus - self.pairing(w2, t1)) % self.modulus
    }

    fn check_len(&self, f: &[Complex64]) -> Result<()> {
        if f.len() != self.n() {
            return Err(Error::invalid(format!(
                "vector of length {} on a domain of size {}",
                f.len(),
                self.n()
            )));
        }
        Ok(())
    }

    /// (π(χ)f)(t) = ω(t) f(t − x).
    pub fn tf_shift(&self, p: usize, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(f)?;
        Ok(self.tf_shift_unchecked(p, f))
    }

    pub(crate) fn tf_shift_unchecked(&self, p: usize, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let (x, w) = self.split(p);
        let mx = self.time_neg(x);
        (0..n)
            .map(|t| self.root(self.pairing(w, t)) * f[self.time_add(t, mx)])
            .collect()
    }

    /// π(χ)* f = c(χ,χ) π(−χ) f.
    pub fn tf_shift_adjoint(&self, p: usize, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(f)?;
        Ok(self.tf_shift_adjoint_unchecked(p, f))
    }

    pub(crate) fn tf_shift_adjoint_unchecked(&self, p: usize, f: &[Complex64]) -> Vec<Complex64> {
        let c = self.cocycle(p, p);
        let mut out = self.tf_shift_unchecked(self.phase_neg(p), f);
        for v in out.iter_mut() {
            *v *= c;
        }
        out
    }

    /// F f(ω) = Σ_t f(t) conj(ω(t)), counting measure on the domain.
    pub fn fourier(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(f)?;
        let n = self.n();
        Ok((0..n)
            .map(|w| {
                (0..n)
                    .map(|t| f[t] * self.root(self.modulus - self.pairing(w, t)))
                    .sum()
            })
            .collect())
    }

    /// Inverse transform with measure 1/n on the dual.
    pub fn inverse_fourier(&self, fhat: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(fhat)?;
        let n = self.n();
        let scale = 1.0 / n as f64;
        Ok((0..n)
            .map(|t| {
                (0..n)
                    .map(|w| fhat[w] * self.root(self.pairing(w, t)))
                    .sum::<Complex64>()
                    * scale
            })
            .collect())
    }

    /// Values of an ambient vector (indexed by G) at the time points of a subgroup domain.
    pub fn restrict_from_ambient(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        if f.len() != self.ambient.cardinality() {
            return Err(Error::invalid("ambient vector has the wrong length"));
        }
        if self.kind == DomainKind::Quotient {
            return Err(Error::invalid("restriction targets a subgroup domain"));
        }
        Ok(self.time.iter().map(|&x| f[x]).collect())
    }

    /// P_H f(k+H) = Σ_{h∈H} f(k+h), onto a quotient domain.
    pub fn periodize_from_ambient(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        if f.len() != self.ambient.cardinality() {
            return Err(Error::invalid("ambient vector has the wrong length"));
        }
        if self.kind != DomainKind::Quotient {
            return Err(Error::invalid("periodization targets a quotient domain"));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.n()];
        for (x, v) in f.iter().enumerate() {
            out[self.time_slot[x] as usize] += v;
        }
        Ok(out)
    }

    /// Covolume n/|Λ| of a phase-space subgroup with counting measure.
    pub fn covolume_of_size(&self, size: usize) -> Rational {
        Rational::new(self.n() as i64, size as i64)
    }
}

pub fn inner(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm2(f: &[Complex64]) -> f64 {
    f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}
