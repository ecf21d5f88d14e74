use std::fmt;

use serde::{Deserialize, Serialize};

/// Photon counts per mode.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Occupation(Vec<u8>);

impl Occupation {
    pub fn new(counts: Vec<u8>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(modes: usize) -> Self {
        Occupation(vec![0; modes])
    }

    /// Single photon in `mode`.
    pub fn single(modes: usize, mode: usize) -> Self {
        let mut counts = vec![0; modes];
        counts[mode] = 1;
        Occupation(counts)
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }

    pub fn mode_count(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> usize {
        self.0.iter().map(|&c| c as usize).sum()
    }

    /// `∏ n_k!`
    pub fn factorial_product(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (1..=c as u32).product::<u32>() as f64)
            .product()
    }

    /// Mode index repeated once per photon, e.g. `(2,0,1)` gives `[0,0,2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.photons());
        for (mode, &c) in self.0.iter().enumerate() {
            out.extend(std::iter::repeat_n(mode, c as usize));
        }
        out
    }

    /// Drop the modes for which `keep` is false.
    pub fn restrict(&self, keep: &[bool]) -> Occupation {
        Occupation(
            self.0
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(&c, _)| c)
                .collect(),
        )
    }

    /// Every occupation of `photons` photons over `modes` modes, in
    /// lexicographically descending order of the first mode.
    pub fn enumerate(modes: usize, photons: usize) -> Vec<Occupation> {
        let mut out = Vec::new();
        let mut buf = vec![0u8; modes];
        fill(&mut buf, 0, photons, &mut out);
        out
    }
}

fn fill(buf: &mut [u8], mode: usize, remaining: usize, out: &mut Vec<Occupation>) {
    if buf.is_empty() {
        if remaining == 0 {
            out.push(Occupation(Vec::new()));
        }
        return;
    }
    if mode == buf.len() - 1 {
        buf[mode] = remaining as u8;
        out.push(Occupation(buf.to_vec()));
        return;
    }
    for k in (0..=remaining).rev() {
        buf[mode] = k as u8;
        fill(buf, mode + 1, remaining - k, out);
    }
}

impl fmt::Debug for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩")
    }
}

impl From<Vec<u8>> for Occupation {
    fn from(v: Vec<u8>) -> Self {
        Occupation(v)
    }
}

impl<const N: usize> From<[u8; N]> for Occupation {
    fn from(v: [u8; N]) -> Self {
        Occupation(v.to_vec())
    }
}
