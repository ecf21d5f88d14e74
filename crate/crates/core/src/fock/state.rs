use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::permanent::permanent_of_selection;
use crate::fock::{ModeTransfer, Occupation};
use crate::C64;

/// Default resource guard on the total photon number.
pub const DEFAULT_PHOTON_CAP: usize = 8;

/// Per-mode postselection constraint: `Some(n)` demands exactly `n` photons,
/// `None` leaves the mode free.
pub type ModePattern = Vec<Option<u8>>;

/// Sparse superposition of Fock basis states with a common photon number.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    mode_count: usize,
    terms: BTreeMap<Occupation, C64>,
}

impl FockVector {
    pub fn empty(mode_count: usize) -> Self {
        FockVector {
            mode_count,
            terms: BTreeMap::new(),
        }
    }

    pub fn basis(occ: Occupation) -> Self {
        let mode_count = occ.mode_count();
        let mut terms = BTreeMap::new();
        terms.insert(occ, C64::new(1.0, 0.0));
        FockVector { mode_count, terms }
    }

    pub fn from_terms<I>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, C64)>,
    {
        let mut out = FockVector::empty(mode_count);
        let mut photons = None;
        for (occ, amp) in terms {
            if occ.mode_count() != mode_count {
                return Err(Error::Dimension {
                    expected: mode_count,
                    got: occ.mode_count(),
                });
            }
            match photons {
                None => photons = Some(occ.photons()),
                Some(n) if n != occ.photons() => {
                    return Err(Error::Shape(format!(
                        "mixed photon numbers {n} and {} in one state",
                        occ.photons()
                    )))
                }
                _ => {}
            }
            *out.terms.entry(occ).or_insert(C64::new(0.0, 0.0)) += amp;
        }
        Ok(out)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &C64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occ: &Occupation) -> C64 {
        self.terms.get(occ).copied().unwrap_or_default()
    }

    /// Common photon number, `None` for the empty state.
    pub fn photons(&self) -> Option<usize> {
        self.terms.keys().next().map(Occupation::photons)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: C64) {
        for a in self.terms.values_mut() {
            *a *= factor;
        }
    }

    fn check_transfer(&self, m: &ModeTransfer, cap: usize) -> Result<usize> {
        if m.dim() != self.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                got: m.dim(),
            });
        }
        let photons = self.photons().unwrap_or(0);
        if photons > cap {
            return Err(Error::PhotonCap { photons, cap });
        }
        Ok(photons)
    }

    /// Evolve through a mode transfer under the default photon cap.
    pub fn evolve(&self, m: &ModeTransfer) -> Result<FockVector> {
        self.evolve_with_cap(m, DEFAULT_PHOTON_CAP)
    }

    pub fn evolve_with_cap(&self, m: &ModeTransfer, cap: usize) -> Result<FockVector> {
        let photons = self.check_transfer(m, cap)?;
        if self.is_empty() {
            return Ok(self.clone());
        }
        let outputs = Occupation::enumerate(self.mode_count, photons);
        let amps = self.amplitudes_unchecked(m, &outputs);
        let terms = outputs
            .into_iter()
            .zip(amps)
            .filter(|(_, a)| *a != C64::new(0.0, 0.0))
            .collect();
        Ok(FockVector {
            mode_count: self.mode_count,
            terms,
        })
    }

    /// Output amplitudes of the evolved state on the listed occupations only.
    pub fn amplitudes_onto(&self, m: &ModeTransfer, outputs: &[Occupation]) -> Result<Vec<C64>> {
        self.check_transfer(m, DEFAULT_PHOTON_CAP)?;
        for o in outputs {
            if o.mode_count() != self.mode_count {
                return Err(Error::Dimension {
                    expected: self.mode_count,
                    got: o.mode_count(),
                });
            }
        }
        Ok(self.amplitudes_unchecked(m, outputs))
    }

    fn amplitudes_unchecked(&self, m: &ModeTransfer, outputs: &[Occupation]) -> Vec<C64> {
        let inputs: Vec<(Vec<usize>, f64, C64)> = self
            .terms
            .iter()
            .map(|(occ, &amp)| (occ.mode_list(), occ.factorial_product(), amp))
            .collect();
        let photons = self.photons().unwrap_or(0);
        outputs
            .iter()
            .map(|out| {
                if out.photons() != photons {
                    return C64::new(0.0, 0.0);
                }
                let rows = out.mode_list();
                let out_fact = out.factorial_product();
                inputs
                    .iter()
                    .map(|(cols, in_fact, amp)| {
                        permanent_of_selection(m.matrix(), &rows, cols) * amp
                            / (in_fact * out_fact).sqrt()
                    })
                    .sum()
            })
            .collect()
    }

    /// Squared norm of the evolved state, from the Gram matrix `M†M` without
    /// enumerating outputs.
    pub fn evolved_norm_sqr(&self, m: &ModeTransfer) -> Result<f64> {
        self.check_transfer(m, DEFAULT_PHOTON_CAP)?;
        let gram = m.matrix().adjoint() * m.matrix();
        let inputs: Vec<(Vec<usize>, f64, C64)> = self
            .terms
            .iter()
            .map(|(occ, &amp)| (occ.mode_list(), occ.factorial_product(), amp))
            .collect();
        let mut total = C64::new(0.0, 0.0);
        for (rows, fr, ar) in &inputs {
            for (cols, fc, ac) in &inputs {
                total += ar.conj() * ac * permanent_of_selection(&gram, rows, cols) / (fr * fc).sqrt();
            }
        }
        Ok(total.re)
    }

    /// Keep the terms matching every exact-count constraint and drop the
    /// constrained modes. Returns the unnormalized remainder and its weight.
    pub fn post_select(&self, pattern: &[Option<u8>]) -> Result<(FockVector, f64)> {
        if pattern.len() != self.mode_count {
            return Err(Error::Dimension {
                expected: self.mode_count,
                got: pattern.len(),
            });
        }
        let keep: Vec<bool> = pattern.iter().map(Option::is_none).collect();
        let free = keep.iter().filter(|&&k| k).count();
        let mut out = FockVector::empty(free);
        for (occ, &amp) in &self.terms {
            let matches = occ
                .counts()
                .iter()
                .zip(pattern)
                .all(|(&c, p)| p.is_none_or(|want| want == c));
            if matches {
                *out.terms.entry(occ.restrict(&keep)).or_default() += amp;
            }
        }
        let prob = out.norm_sqr();
        Ok((out, prob))
    }
}

/// Every full-width occupation with `photons` photons that satisfies `pattern`.
pub fn matching_occupations(pattern: &[Option<u8>], photons: usize) -> Vec<Occupation> {
    let fixed: usize = pattern.iter().flatten().map(|&c| c as usize).sum();
    if fixed > photons {
        return Vec::new();
    }
    let free_modes = pattern.iter().filter(|p| p.is_none()).count();
    Occupation::enumerate(free_modes, photons - fixed)
        .into_iter()
        .map(|sub| {
            let mut it = sub.counts().iter();
            Occupation::new(
                pattern
                    .iter()
                    .map(|p| p.unwrap_or_else(|| *it.next().unwrap()))
                    .collect(),
            )
        })
        .collect()
}

pub fn evolve(state: &FockVector, m: &ModeTransfer) -> Result<FockVector> {
    state.evolve(m)
}

pub fn post_select(state: &FockVector, pattern: &[Option<u8>]) -> Result<(FockVector, f64)> {
    state.post_select(pattern)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::{bs_matrix, ps_matrix};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn embed(block: &ModeTransfer, modes: &[usize], n: usize) -> ModeTransfer {
        let mut t = ModeTransfer::identity(n);
        t.apply_block(block.matrix(), modes, false);
        t
    }

    #[test]
    fn phase_shifter_on_single_photon() {
        let theta = 0.7;
        let m = embed(&ps_matrix(theta), &[0], 2);
        let out = FockVector::basis([1, 0].into()).evolve(&m).unwrap();
        let a = out.amplitude(&[1, 0].into());
        assert!((a - C64::from_polar(1.0, theta)).norm() < 1e-15);
        assert_eq!(out.len(), 1);
    }

    #[test]
    fn hong_ou_mandel() {
        let out = FockVector::basis([1, 1].into())
            .evolve(&bs_matrix(PI / 2.0, 0.0))
            .unwrap();
        let i_over_sqrt2 = C64::new(0.0, FRAC_1_SQRT_2);
        assert!((out.amplitude(&[2, 0].into()) - i_over_sqrt2).norm() < 1e-15);
        assert!((out.amplitude(&[0, 2].into()) - i_over_sqrt2).norm() < 1e-15);
        assert!(out.amplitude(&[1, 1].into()).norm_sqr() < 1e-30);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let psi = FockVector::from_terms(
            3,
            [
                (Occupation::from([1, 1, 0]), C64::new(0.6, 0.0)),
                (Occupation::from([0, 0, 2]), C64::new(0.0, 0.8)),
            ],
        )
        .unwrap();
        let out = psi.evolve(&ModeTransfer::identity(3)).unwrap();
        for (occ, a) in psi.terms() {
            assert!((out.amplitude(occ) - a).norm() < 1e-15);
        }
        assert!((out.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evolve_errors() {
        let psi = FockVector::basis([1, 0].into());
        assert!(matches!(
            psi.evolve(&ModeTransfer::identity(3)),
            Err(Error::Dimension { .. })
        ));
        let many = FockVector::basis([5, 4].into());
        assert!(matches!(
            many.evolve(&ModeTransfer::identity(2)),
            Err(Error::PhotonCap { photons: 9, cap: 8 })
        ));
        assert!(FockVector::from_terms(2, [(Occupation::from([1, 0]), C64::new(1.0, 0.0)), (Occupation::from([1, 1]), C64::new(1.0, 0.0))]).is_err());
    }

    #[test]
    fn post_selection_examples() {
        let h = FRAC_1_SQRT_2;
        let psi = FockVector::from_terms(
            3,
            [
                (Occupation::from([1, 0, 1]), C64::new(h, 0.0)),
                (Occupation::from([0, 1, 1]), C64::new(h, 0.0)),
            ],
        )
        .unwrap();

        let (kept, p) = psi.post_select(&[None, None, Some(1)]).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        assert_eq!(kept.mode_count(), 2);
        assert!((kept.amplitude(&[1, 0].into()).re - h).abs() < 1e-15);
        assert!((kept.amplitude(&[0, 1].into()).re - h).abs() < 1e-15);

        let (kept, p) = psi.post_select(&[Some(1), None, None]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert_eq!(kept.len(), 1);
        assert!((kept.amplitude(&[0, 1].into()).re - h).abs() < 1e-15);

        let (kept, p) = psi.post_select(&[Some(2), None, None]).unwrap();
        assert!(kept.is_empty());
        assert_eq!(p, 0.0);

        assert!(psi.post_select(&[None, None]).is_err());
    }

    #[test]
    fn matching_occupations_respects_pattern() {
        let occs = matching_occupations(&[Some(1), None, Some(0), None], 3);
        assert_eq!(occs.len(), 3);
        assert!(occs.iter().all(|o| o.counts()[0] == 1 && o.counts()[2] == 0 && o.photons() == 3));
    }

    fn random_unitary(m: usize, seed: &[f64]) -> ModeTransfer {
        let a = DMatrix::from_fn(m, m, |i, j| C64::new(seed[2 * (i * m + j)], seed[2 * (i * m + j) + 1]));
        let q = a.qr().q();
        ModeTransfer::unitary(q).unwrap()
    }

    fn random_state(m: usize, n: usize, seed: &[f64]) -> FockVector {
        let occs = Occupation::enumerate(m, n);
        let terms: Vec<_> = occs
            .into_iter()
            .take(6)
            .enumerate()
            .map(|(k, o)| (o, C64::new(seed[2 * k], seed[2 * k + 1])))
            .collect();
        let mut s = FockVector::from_terms(m, terms).unwrap();
        let norm = s.norm_sqr().sqrt();
        s.scale(C64::new(1.0 / norm, 0.0));
        s
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn unitary_evolution_preserves_norm_and_photons(
            m in 2usize..=6,
            n in 1usize..=4,
            seed in proptest::collection::vec(-1.0f64..1.0, 72),
            sseed in proptest::collection::vec(0.1f64..1.0, 12),
        ) {
            let u = random_unitary(m, &seed);
            let psi = random_state(m, n, &sseed);
            let out = psi.evolve(&u).unwrap();
            prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
            prop_assert!(out.terms().all(|(o, _)| o.photons() == n));
            prop_assert!((psi.evolved_norm_sqr(&u).unwrap() - 1.0).abs() < 1e-10);
        }

        #[test]
        fn evolution_composes(
            m in 2usize..=4,
            n in 1usize..=3,
            s1 in proptest::collection::vec(-1.0f64..1.0, 32),
            s2 in proptest::collection::vec(-1.0f64..1.0, 32),
            damp in 0.2f64..1.0,
            sseed in proptest::collection::vec(0.1f64..1.0, 12),
        ) {
            let u1 = random_unitary(m, &s1);
            let mut m1 = u1.into_matrix();
            // make the first map lossy on mode 0
            for c in 0..m { m1[(0, c)] *= damp; }
            let m1 = ModeTransfer::subunitary(m1).unwrap();
            let m2 = random_unitary(m, &s2);
            let psi = random_state(m, n, &sseed);
            let step = psi.evolve(&m1).unwrap().evolve(&m2).unwrap();
            let once = psi.evolve(&m1.then(&m2).unwrap()).unwrap();
            for (o, a) in once.terms() {
                prop_assert!((step.amplitude(o) - a).norm() < 1e-10);
            }
            prop_assert!(step.norm_sqr() <= 1.0 + 1e-9);
            prop_assert!((psi.evolved_norm_sqr(&m1).unwrap() - psi.evolve(&m1).unwrap().norm_sqr()).abs() < 1e-10);
        }
    }
}
