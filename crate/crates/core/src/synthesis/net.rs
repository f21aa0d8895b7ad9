//! The base epsilon-net: every distinct SU(2) element (up to sign) reachable
//! by a word of at most [`BASE_WORD_LENGTH`] single-qubit gates, each kept
//! with the first (shortest) word that reaches it.

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quantum::GateKind;
use crate::synthesis::kdtree::KdTree;
use crate::synthesis::su2::Su2;

pub const BASE_WORD_LENGTH: usize = 16;

/// Environment variable naming the net cache file.
pub const NET_CACHE_ENV: &str = "QADVICE_NET_CACHE";

const CACHE_MAGIC: &[u8; 6] = b"QANET\0";
const CACHE_VERSION: u16 = 1;
const NO_PARENT: u32 = u32::MAX;
const KEY_SCALE: f64 = 1e8;

const ALPHABET: [GateKind; 6] = GateKind::SINGLE_QUBIT;

pub struct BaseNet {
    max_len: usize,
    /// `(parent, gate)`; the word of entry `i` is the word of its parent followed by the gate.
    parents: Vec<(u32, u8)>,
    elements: Vec<Su2>,
    tree: KdTree<4>,
    bloch_tree: KdTree<3>,
}

fn canonical_key(q: Su2) -> [i64; 4] {
    let a = q.to_array();
    let sign = a
        .iter()
        .find(|c| c.abs() > 1e-7)
        .map_or(1.0, |c| c.signum());
    a.map(|c| (sign * c * KEY_SCALE).round() as i64)
}

fn bloch_key(b: [f64; 3]) -> [i64; 3] {
    b.map(|c| (c * KEY_SCALE).round() as i64)
}

impl BaseNet {
    /// Breadth-first enumeration of words up to `max_len`.
    pub fn build(max_len: usize) -> BaseNet {
        let mut parents = vec![(NO_PARENT, 0u8)];
        let mut elements = vec![Su2::IDENTITY];
        let mut seen: HashMap<[i64; 4], u32> = HashMap::new();
        seen.insert(canonical_key(Su2::IDENTITY), 0);
        let mut frontier = 0..1usize;
        for _ in 0..max_len {
            let start = elements.len();
            for idx in frontier.clone() {
                let q = elements[idx];
                for (g, &kind) in ALPHABET.iter().enumerate() {
                    let next = Su2::of_gate(kind) * q;
                    if let Entry::Vacant(slot) = seen.entry(canonical_key(next)) {
                        slot.insert(elements.len() as u32);
                        parents.push((idx as u32, g as u8));
                        elements.push(next);
                    }
                }
            }
            frontier = start..elements.len();
            if frontier.is_empty() {
                break;
            }
        }
        Self::index(max_len, parents, elements)
    }

    fn from_parents(max_len: usize, parents: Vec<(u32, u8)>) -> Result<BaseNet> {
        let mut elements = Vec::with_capacity(parents.len());
        for (i, &(p, g)) in parents.iter().enumerate() {
            let q = if p == NO_PARENT {
                if i != 0 {
                    return Err(Error::Codec(format!("net entry {i} has no parent")));
                }
                Su2::IDENTITY
            } else {
                let parent = *elements
                    .get(p as usize)
                    .ok_or_else(|| Error::Codec(format!("net entry {i} precedes its parent")))?;
                let kind = *ALPHABET
                    .get(g as usize)
                    .ok_or_else(|| Error::Codec(format!("net entry {i} has gate {g}")))?;
                Su2::of_gate(kind) * parent
            };
            elements.push(q);
        }
        if elements.is_empty() {
            return Err(Error::Codec("empty net".into()));
        }
        Ok(Self::index(max_len, parents, elements))
    }

    fn index(max_len: usize, parents: Vec<(u32, u8)>, elements: Vec<Su2>) -> BaseNet {
        let mut entries = Vec::with_capacity(2 * elements.len());
        for (i, q) in elements.iter().enumerate() {
            entries.push((q.to_array(), i as u32));
            entries.push((q.neg().to_array(), i as u32));
        }
        // first (shortest) word for each distinct image of |0>
        let mut bloch_seen = HashMap::new();
        let mut bloch_entries = Vec::new();
        for (i, q) in elements.iter().enumerate() {
            let b = q.bloch_of_zero();
            if bloch_seen.insert(bloch_key(b), ()).is_none() {
                bloch_entries.push((b, i as u32));
            }
        }
        BaseNet {
            max_len,
            parents,
            elements,
            tree: KdTree::build(entries),
            bloch_tree: KdTree::build(bloch_entries),
        }
    }

    pub fn max_word_length(&self) -> usize {
        self.max_len
    }

    /// Number of distinct elements, identity included.
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, index: usize) -> Su2 {
        self.elements[index]
    }

    /// Gate word of entry `index`, in application order.
    pub fn word(&self, index: usize) -> Vec<GateKind> {
        let mut word = Vec::new();
        let mut i = index as u32;
        while self.parents[i as usize].0 != NO_PARENT {
            let (p, g) = self.parents[i as usize];
            word.push(ALPHABET[g as usize]);
            i = p;
        }
        word.reverse();
        word
    }

    /// Closest element to `q` (up to sign) and its distance.
    pub fn nearest(&self, q: Su2) -> (usize, f64) {
        let (idx, d2) = self
            .tree
            .nearest(&q.to_array())
            .expect("net is never empty");
        (idx as usize, d2.sqrt())
    }

    /// Element whose image of `|0>` is closest to the Bloch vector `b`, and
    /// the phase-invariant state distance `2 sin(theta/4)` for Bloch angle `theta`.
    pub fn nearest_state(&self, b: [f64; 3]) -> (usize, f64) {
        let (idx, d2) = self.bloch_tree.nearest(&b).expect("net is never empty");
        // chord |b - b'| = 2 sin(theta/2)
        let theta = 2.0 * (d2.sqrt() / 2.0).min(1.0).asin();
        (idx as usize, 2.0 * (theta / 4.0).sin())
    }

    /// Largest nearest-element distance over `samples` Haar-random targets.
    pub fn estimate_covering_radius(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..samples)
            .map(|_| {
                let v: [f64; 4] = [(); 4].map(|_| StandardNormal.sample(&mut rng));
                self.nearest(Su2::from_array(v).normalized()).1
            })
            .fold(0.0, f64::max)
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut bytes = Vec::with_capacity(14 + 5 * self.parents.len());
        bytes.extend_from_slice(CACHE_MAGIC);
        bytes.extend_from_slice(&CACHE_VERSION.to_le_bytes());
        bytes.extend_from_slice(&(self.max_len as u16).to_le_bytes());
        bytes.extend_from_slice(&(self.parents.len() as u32).to_le_bytes());
        for &(p, g) in &self.parents {
            bytes.extend_from_slice(&p.to_le_bytes());
            bytes.push(g);
        }
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)?.write_all(&bytes)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn read_cache(path: &Path, max_len: usize) -> Result<BaseNet> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        if bytes.len() < 14 || &bytes[..6] != CACHE_MAGIC {
            return Err(Error::Codec("not a net cache file".into()));
        }
        let version = u16::from_le_bytes([bytes[6], bytes[7]]);
        let len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
        let count = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        if version != CACHE_VERSION || len != max_len {
            return Err(Error::Codec(format!(
                "cache has version {version}, word length {len}"
            )));
        }
        let body = &bytes[14..];
        if body.len() != 5 * count {
            return Err(Error::Codec("truncated net cache".into()));
        }
        let parents = body
            .chunks_exact(5)
            .map(|c| (u32::from_le_bytes(c[..4].try_into().unwrap()), c[4]))
            .collect();
        Self::from_parents(max_len, parents)
    }
}

static NET: OnceLock<BaseNet> = OnceLock::new();

/// The shared net, read from the cache named by [`NET_CACHE_ENV`] when
/// possible and built (then cached) otherwise.
pub fn base_net() -> &'static BaseNet {
    NET.get_or_init(|| {
        let cache = std::env::var_os(NET_CACHE_ENV).map(std::path::PathBuf::from);
        if let Some(path) = &cache {
            if let Ok(net) = BaseNet::read_cache(path, BASE_WORD_LENGTH) {
                return net;
            }
        }
        let net = BaseNet::build(BASE_WORD_LENGTH);
        if let Some(path) = &cache {
            // a failed write only costs a rebuild next time
            let _ = net.write_cache(path);
        }
        net
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_net_words_reproduce_elements() {
        let net = BaseNet::build(6);
        for i in (0..net.len()).step_by(7) {
            let word = net.word(i);
            assert!(word.len() <= 6);
            assert!(Su2::of_word(&word).distance(net.element(i)) < 1e-12);
        }
        // the single-qubit Clifford group has 24 elements up to phase
        let cliffords = BaseNet::build(12);
        let h = cliffords.nearest(Su2::of_gate(GateKind::H));
        assert_eq!(cliffords.word(h.0), vec![GateKind::H]);
        assert!(h.1 < 1e-12);
    }

    #[test]
    fn cache_round_trip() {
        let net = BaseNet::build(5);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("net.bin");
        net.write_cache(&path).unwrap();
        let back = BaseNet::read_cache(&path, 5).unwrap();
        assert_eq!(back.len(), net.len());
        for i in 0..net.len() {
            assert_eq!(back.word(i), net.word(i));
        }
        assert!(BaseNet::read_cache(&path, 6).is_err());
        std::fs::write(&path, b"junk").unwrap();
        assert!(BaseNet::read_cache(&path, 5).is_err());
    }

    #[test]
    fn state_lookup_prefers_hadamard() {
        let net = BaseNet::build(8);
        let (idx, d) = net.nearest_state([1.0, 0.0, 0.0]);
        assert_eq!(net.word(idx), vec![GateKind::H]);
        assert!(d < 1e-7);
    }
}
