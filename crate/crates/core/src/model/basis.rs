//! Occupation-number bases for a fixed total excitation number.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Conserved sector: total excitations (photons + site qubits + coupler
/// qubits) and whether junction qubits are part of the Hilbert space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SectorSpec {
    pub n_total: u32,
    pub include_couplers: bool,
}

impl SectorSpec {
    pub fn effective(n_total: u32) -> Self {
        Self {
            n_total,
            include_couplers: false,
        }
    }

    pub fn full(n_total: u32) -> Self {
        Self {
            n_total,
            include_couplers: true,
        }
    }
}

/// One product state `|n_1 s_1, ..., n_L s_L> (x) |c_1 ... c_L>`.
///
/// The derived ordering compares photons, then site qubits, then coupler
/// qubits, which is lexicographic order on the flattened occupation tuple for
/// states of the same shape.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub photons: Vec<u32>,
    pub site_qubits: Vec<bool>,
    pub coupler_qubits: Option<Vec<bool>>,
}

impl BasisState {
    pub fn n_sites(&self) -> usize {
        self.photons.len()
    }

    pub fn total_excitation(&self) -> u32 {
        let photons: u32 = self.photons.iter().sum();
        let qubits = self.site_qubits.iter().filter(|&&q| q).count() as u32;
        let couplers = self
            .coupler_qubits
            .as_ref()
            .map_or(0, |c| c.iter().filter(|&&q| q).count() as u32);
        photons + qubits + couplers
    }

    /// Polariton number `a_i^dag a_i + |e><e|_i` on `site`.
    pub fn polariton_number(&self, site: usize) -> u32 {
        self.photons[site] + u32::from(self.site_qubits[site])
    }

    pub fn coupler_excitation(&self) -> u32 {
        self.coupler_qubits
            .as_ref()
            .map_or(0, |c| c.iter().filter(|&&q| q).count() as u32)
    }

    /// `(n_1, ..., n_L, s_1, ..., s_L, c_1, ..., c_L)` with booleans as 0/1.
    pub fn occupation_tuple(&self) -> Vec<u32> {
        let mut out: Vec<u32> = self.photons.clone();
        out.extend(self.site_qubits.iter().map(|&q| u32::from(q)));
        if let Some(c) = &self.coupler_qubits {
            out.extend(c.iter().map(|&q| u32::from(q)));
        }
        out
    }
}

/// Ordered basis of a sector with a reverse index.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    n_sites: usize,
    sector: SectorSpec,
    states: Vec<BasisState>,
    index: BTreeMap<BasisState, usize>,
    tag: u64,
}

impl BasisSet {
    /// Wraps an explicit list of states, keeping the given order.
    ///
    /// Every state must have the sector's shape and total excitation, and no
    /// state may repeat.
    pub fn from_states(
        n_sites: usize,
        sector: SectorSpec,
        states: Vec<BasisState>,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::InvalidBasis("a ring needs at least one site".into()));
        }
        let mut index = BTreeMap::new();
        for (i, s) in states.iter().enumerate() {
            if s.photons.len() != n_sites
                || s.site_qubits.len() != n_sites
                || s.coupler_qubits.is_some() != sector.include_couplers
                || s.coupler_qubits
                    .as_ref()
                    .is_some_and(|c| c.len() != n_sites)
            {
                return Err(Error::InvalidBasis(format!(
                    "state {i} has the wrong shape"
                )));
            }
            if s.total_excitation() != sector.n_total {
                return Err(Error::InvalidBasis(format!(
                    "state {i} carries {} excitations, sector has {}",
                    s.total_excitation(),
                    sector.n_total
                )));
            }
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::InvalidBasis(format!("state {i} is a duplicate")));
            }
        }
        let tag = fingerprint(n_sites, sector, &states);
        Ok(Self {
            n_sites,
            sector,
            states,
            index,
            tag,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn sector(&self) -> SectorSpec {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &BasisState {
        &self.states[i]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.index.get(state).copied()
    }

    /// Identity of this basis (content and order). States carry it so that
    /// observables can refuse a state built over a different basis.
    pub fn tag(&self) -> u64 {
        self.tag
    }

    /// Indices of states with every site qubit (and coupler) in the ground
    /// state.
    pub fn photon_only_indices(&self) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.site_qubits.iter().any(|&q| q) && s.coupler_excitation() == 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site < self.n_sites {
            Ok(())
        } else {
            Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            })
        }
    }
}

/// Enumerates every occupation configuration of the sector in lexicographic
/// order of the flattened occupation tuple.
pub fn enumerate_basis(n_sites: usize, sector: SectorSpec) -> BasisSet {
    assert!(n_sites >= 1, "a ring needs at least one site");
    let n_qubits = if sector.include_couplers {
        2 * n_sites
    } else {
        n_sites
    };
    let n_total = sector.n_total;

    let mut states = Vec::new();
    let mut photons = vec![0u32; n_sites];
    // Qubit patterns are visited as binary counters so that the photon-major
    // order comes out sorted without a final sort.
    let mut compositions = Vec::new();
    collect_compositions(&mut photons, 0, n_total, &mut compositions);
    for photons in compositions {
        let used: u32 = photons.iter().sum();
        let remaining = n_total - used;
        if remaining as usize > n_qubits {
            continue;
        }
        for mask in 0u64..(1u64 << n_qubits) {
            if mask.count_ones() != remaining {
                continue;
            }
            // Most significant bit = first qubit, so increasing mask is
            // lexicographic on the bit tuple.
            let bit = |k: usize| (mask >> (n_qubits - 1 - k)) & 1 == 1;
            let site_qubits = (0..n_sites).map(bit).collect();
            let coupler_qubits = sector
                .include_couplers
                .then(|| (n_sites..2 * n_sites).map(bit).collect());
            states.push(BasisState {
                photons: photons.clone(),
                site_qubits,
                coupler_qubits,
            });
        }
    }
    debug_assert!(states.windows(2).all(|w| w[0] < w[1]));
    BasisSet::from_states(n_sites, sector, states).expect("enumeration yields a valid basis")
}

/// All photon vectors with sum at most `budget`, in lexicographic order.
fn collect_compositions(current: &mut Vec<u32>, site: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if site == current.len() {
        out.push(current.clone());
        return;
    }
    for n in 0..=budget {
        current[site] = n;
        collect_compositions(current, site + 1, budget - n, out);
    }
    current[site] = 0;
}

/// Sector dimension without enumerating:
/// `sum_k C(q, k) * C(N - k + L - 1, L - 1)` with `q` qubits and `L` sites.
pub fn sector_dimension(n_sites: usize, sector: SectorSpec) -> usize {
    let n_qubits = if sector.include_couplers {
        2 * n_sites
    } else {
        n_sites
    } as u64;
    let n = u64::from(sector.n_total);
    let l = n_sites as u64;
    (0..=n.min(n_qubits))
        .map(|k| binomial(n_qubits, k) * binomial(n - k + l - 1, l - 1))
        .sum::<u64>() as usize
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn fingerprint(n_sites: usize, sector: SectorSpec, states: &[BasisState]) -> u64 {
    // FNV-1a over the flattened layout.
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    let mut feed = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(PRIME);
        }
    };
    feed(n_sites as u64);
    feed(u64::from(sector.n_total));
    feed(u64::from(sector.include_couplers));
    feed(states.len() as u64);
    for s in states {
        for x in s.occupation_tuple() {
            feed(u64::from(x));
        }
    }
    h
}
