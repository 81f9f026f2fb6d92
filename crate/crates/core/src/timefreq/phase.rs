use std::collections::HashSet;
use std::sync::Arc;

use num_complex::Complex64;

use super::domain::Domain;
use crate::error::{Error, Result};
use crate::lca::{self, Element, Subgroup};
use crate::rational::Rational;

const NONE: u32 = u32::MAX;

/// A subgroup of the phase space of a finite domain, with members in ascending
/// order of the phase index t·n + w (lexicographic in (x, ω) for full domains).
#[derive(Clone, Debug)]
pub struct PhaseSubgroup {
    domain: Arc<Domain>,
    points: Vec<usize>,
    slot: Vec<u32>,
    generators: Vec<usize>,
}

impl PartialEq for PhaseSubgroup {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.domain, &other.domain) && self.points == other.points
    }
}

fn closure(domain: &Domain, start: &[usize], gens: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; domain.phase_len()];
    let mut out = Vec::with_capacity(start.len().max(1));
    seen[0] = true;
    out.push(0);
    for &s in start {
        if !seen[s] {
            seen[s] = true;
            out.push(s);
        }
    }
    let mut head = 0;
    while head < out.len() {
        let p = out[head];
        head += 1;
        for &g in gens {
            let q = domain.phase_add(p, g);
            if !seen[q] {
                seen[q] = true;
                out.push(q);
            }
        }
    }
    out.sort_unstable();
    out
}

impl PhaseSubgroup {
    fn from_sorted(
        domain: Arc<Domain>,
        points: Vec<usize>,
        generators: Option<Vec<usize>>,
    ) -> Self {
        let mut slot = vec![NONE; domain.phase_len()];
        for (i, &p) in points.iter().enumerate() {
            slot[p] = i as u32;
        }
        let generators = generators.unwrap_or_else(|| {
            let mut gens = Vec::new();
            let mut span = vec![0usize];
            let mut inside = vec![false; domain.phase_len()];
            inside[0] = true;
            for &p in &points {
                if inside[p] {
                    continue;
                }
                gens.push(p);
                span = closure(&domain, &span, &[p]);
                for &s in &span {
                    inside[s] = true;
                }
            }
            gens
        });
        PhaseSubgroup {
            domain,
            points,
            slot,
            generators,
        }
    }

    pub fn generated(domain: &Arc<Domain>, gens: &[usize]) -> Self {
        let points = closure(domain, &[], gens);
        Self::from_sorted(domain.clone(), points, None)
    }

    /// Subgroup generated by points given as ambient (x, ω) labels.
    pub fn from_labels(domain: &Arc<Domain>, gens: &[(Element, Element)]) -> Result<Self> {
        let idx = gens
            .iter()
            .map(|(x, w)| {
                domain.point_from_labels(x, w).ok_or_else(|| {
                    Error::invalid(format!(
                        "({x:?}, {w:?}) is not a phase point of this domain"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::generated(domain, &idx))
    }

    /// Takes a member list that is already known to be a subgroup.
    pub fn from_points(domain: &Arc<Domain>, mut points: Vec<usize>) -> Self {
        points.sort_unstable();
        points.dedup();
        Self::from_sorted(domain.clone(), points, None)
    }

    pub fn full(domain: &Arc<Domain>) -> Self {
        Self::from_sorted(domain.clone(), (0..domain.phase_len()).collect(), None)
    }

    pub fn trivial(domain: &Arc<Domain>) -> Self {
        Self::from_sorted(domain.clone(), vec![0], Some(Vec::new()))
    }

    /// For a full domain over G, the phase subgroup matching Λ ≤ G×G.
    pub fn from_subgroup(domain: &Arc<Domain>, lambda: &Subgroup) -> Result<Self> {
        if lambda.ambient() != &domain.ambient().phase_space()
            || domain.n() != domain.ambient().cardinality()
        {
            return Err(Error::invalid(
                "lattice must be a subgroup of G×Ĝ over a full domain",
            ));
        }
        Ok(Self::from_sorted(
            domain.clone(),
            lambda.member_indices().to_vec(),
            None,
        ))
    }

    /// Inverse of `from_subgroup`; only meaningful on full domains.
    pub fn to_subgroup(&self) -> Result<Subgroup> {
        let phase = self.domain.ambient().phase_space();
        if self.domain.n() != self.domain.ambient().cardinality() {
            return Err(Error::invalid(
                "only full-domain phase subgroups map to G×Ĝ",
            ));
        }
        lca::subgroup_from_generators(
            &phase,
            &self
                .generators
                .iter()
                .map(|&p| phase.element(p))
                .collect::<Vec<_>>(),
        )
    }

    /// All subgroups of the phase space of `domain`, sorted by member list.
    pub fn all(domain: &Arc<Domain>) -> Vec<PhaseSubgroup> {
        let m = domain.phase_len();
        let mut found: HashSet<Vec<usize>> = HashSet::new();
        let mut queue: Vec<Vec<usize>> = vec![vec![0]];
        found.insert(vec![0]);
        let mut head = 0;
        while head < queue.len() {
            let current = queue[head].clone();
            head += 1;
            let mut inside = vec![false; m];
            for &p in &current {
                inside[p] = true;
            }
            for x in 0..m {
                if inside[x] {
                    continue;
                }
                let next = closure(domain, &current, &[x]);
                if found.insert(next.clone()) {
                    queue.push(next);
                }
            }
        }
        queue.sort();
        queue
            .into_iter()
            .map(|pts| Self::from_sorted(domain.clone(), pts, None))
            .collect()
    }

    pub fn domain(&self) -> &Arc<Domain> {
        &self.domain
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, p: usize) -> bool {
        self.slot[p] != NONE
    }

    pub fn slot(&self, p: usize) -> Option<usize> {
        let s = self.slot[p];
        (s != NONE).then_some(s as usize)
    }

    /// s(Λ) = n / |Λ|.
    pub fn covolume(&self) -> Rational {
        self.domain.covolume_of_size(self.len())
    }

    /// Λ° = {χ : c_s(χ, λ) = 1 for all λ ∈ Λ}, by scanning the phase space.
    pub fn adjoint(&self) -> PhaseSubgroup {
        let d = &self.domain;
        let points: Vec<usize> = (0..d.phase_len())
            .filter(|&p| {
                self.generators
                    .iter()
                    .all(|&g| d.symplectic_phase(p, g) == 0)
            })
            .collect();
        Self::from_sorted(d.clone(), points, None)
    }

    pub fn is_subset_of(&self, other: &PhaseSubgroup) -> bool {
        self.points.iter().all(|&p| other.contains(p))
    }

    pub fn same_points(&self, other: &PhaseSubgroup) -> bool {
        self.points == other.points
    }

    pub fn labels(&self) -> Vec<(Element, Element)> {
        self.points
            .iter()
            .map(|&p| self.domain.point_labels(p))
            .collect()
    }
}

/// V_g f(λ) = ⟨f, π(λ)g⟩ for every λ ∈ Λ, in member order.
pub fn stft(f: &[Complex64], g: &[Complex64], lambda: &PhaseSubgroup) -> Result<Vec<Complex64>> {
    let d = lambda.domain();
    if f.len() != d.n() || g.len() != d.n() {
        return Err(Error::invalid(
            "STFT inputs must live on the lattice domain",
        ));
    }
    Ok(lambda
        .points()
        .iter()
        .map(|&p| super::domain::inner(f, &d.tf_shift_unchecked(p, g)))
        .collect())
}
