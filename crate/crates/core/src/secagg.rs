//! Simulated Diffie-Hellman key agreement and pairwise-mask secure
//! aggregation.
//!
//! Simulation grade only: the group is a fixed prime field per security
//! parameter, exponentiation is plain square-and-multiply and nothing is
//! constant time. What it does guarantee is the aggregation algebra: masks
//! cancel exactly, so the collector's sum equals the plaintext sum.

use std::collections::BTreeMap;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// `(λ, q, g)`: `q` is the largest prime below `2^λ`, `g` its smallest
/// primitive root.
const GROUP_TABLE: [(u32, u64, u64); 49] = [
    (16, 0xfff1, 17),
    (17, 0x1ffff, 3),
    (18, 0x3fffb, 2),
    (19, 0x7ffff, 3),
    (20, 0xffffd, 2),
    (21, 0x1ffff7, 5),
    (22, 0x3ffffd, 7),
    (23, 0x7ffff1, 3),
    (24, 0xfffffd, 5),
    (25, 0x1ffffd9, 3),
    (26, 0x3fffffb, 2),
    (27, 0x7ffffd9, 3),
    (28, 0xfffffc7, 3),
    (29, 0x1ffffffd, 2),
    (30, 0x3fffffdd, 2),
    (31, 0x7fffffff, 7),
    (32, 0xfffffffb, 2),
    (33, 0x1fffffff7, 5),
    (34, 0x3ffffffd7, 5),
    (35, 0x7ffffffe1, 5),
    (36, 0xffffffffb, 2),
    (37, 0x1fffffffe7, 5),
    (38, 0x3fffffffd3, 2),
    (39, 0x7ffffffff9, 11),
    (40, 0xffffffffa9, 13),
    (41, 0x1ffffffffeb, 2),
    (42, 0x3fffffffff5, 2),
    (43, 0x7ffffffffc7, 7),
    (44, 0xfffffffffef, 7),
    (45, 0x1fffffffffc9, 10),
    (46, 0x3fffffffffeb, 2),
    (47, 0x7fffffffff8d, 5),
    (48, 0xffffffffffc5, 2),
    (49, 0x1ffffffffffaf, 17),
    (50, 0x3ffffffffffe5, 6),
    (51, 0x7ffffffffff7f, 11),
    (52, 0xfffffffffffd1, 3),
    (53, 0x1fffffffffff91, 3),
    (54, 0x3fffffffffffdf, 3),
    (55, 0x7fffffffffffc9, 7),
    (56, 0xfffffffffffffb, 6),
    (57, 0x1fffffffffffff3, 2),
    (58, 0x3ffffffffffffe5, 6),
    (59, 0x7ffffffffffffc9, 5),
    (60, 0xfffffffffffffa3, 2),
    (61, 0x1fffffffffffffff, 37),
    (62, 0x3fffffffffffffc7, 6),
    (63, 0x7fffffffffffffe7, 3),
    (64, 0xffffffffffffffc5, 2),
];

pub const DEFAULT_LAMBDA: u32 = 61;

/// Scale used to carry non-negative reals through the integer field.
pub const FIXED_POINT_SCALE: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupParams {
    pub lambda: u32,
    pub modulus: u64,
    pub generator: u64,
}

impl GroupParams {
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (a, b) = (a % self.modulus, b % self.modulus);
        let (sum, carry) = a.overflowing_add(b);
        if carry || sum >= self.modulus {
            sum.wrapping_sub(self.modulus)
        } else {
            sum
        }
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.modulus - b % self.modulus)
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut result = 1 % self.modulus;
        let mut base = base % self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                result = self.mul(result, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        result
    }
}

/// Group parameters for security parameter `lambda` (bit length of `q`).
pub fn ka_param(lambda: u32) -> Result<GroupParams> {
    GROUP_TABLE
        .iter()
        .find(|(l, _, _)| *l == lambda)
        .map(|&(lambda, modulus, generator)| GroupParams {
            lambda,
            modulus,
            generator,
        })
        .ok_or(Error::UnsupportedSecurityParameter(lambda))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyPair {
    pub secret: u64,
    pub public: u64,
}

pub fn ka_gen<R: Rng + ?Sized>(params: &GroupParams, rng: &mut R) -> KeyPair {
    let secret = rng.gen_range(1..params.modulus - 1);
    KeyPair {
        secret,
        public: params.pow(params.generator, secret),
    }
}

/// Shared secret `pk^sk`.
pub fn ka_agree(secret: u64, peer_public: u64, params: &GroupParams) -> Result<u64> {
    if peer_public == 0 || peer_public >= params.modulus {
        return Err(Error::KeyOutOfRange(peer_public));
    }
    Ok(params.pow(peer_public, secret))
}

/// Public hash from a shared key and a round id to a uniform element of Z_q.
pub fn derive_mask_scalar(shared_key: u64, round: u64, params: &GroupParams) -> u64 {
    let digest = Sha256::new()
        .chain_update(b"degree-ldp/pairwise-mask/v1")
        .chain_update(params.modulus.to_le_bytes())
        .chain_update(shared_key.to_le_bytes())
        .chain_update(round.to_le_bytes())
        .finalize();
    let mut wide = [0u8; 16];
    wide.copy_from_slice(&digest[..16]);
    (u128::from_le_bytes(wide) % params.modulus as u128) as u64
}

/// Mask of `party`: the derived scalars of peers with a larger index are
/// added, those with a smaller index subtracted, so all masks sum to zero.
pub fn compute_mask(
    party: usize,
    peers: &[usize],
    shared_keys: &BTreeMap<usize, u64>,
    round: u64,
    params: &GroupParams,
) -> Result<u64> {
    let mut mask = 0;
    for &peer in peers {
        let key = shared_keys
            .get(&peer)
            .ok_or(Error::MissingSharedKey { party, peer })?;
        let scalar = derive_mask_scalar(*key, round, params);
        mask = if party < peer {
            params.add(mask, scalar)
        } else {
            params.sub(mask, scalar)
        };
    }
    Ok(mask)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskedValue(pub u64);

pub fn mask_value(value: u64, mask: u64, params: &GroupParams) -> Result<MaskedValue> {
    if value >= params.modulus {
        return Err(Error::ValueOutOfRange {
            value,
            modulus: params.modulus,
        });
    }
    Ok(MaskedValue(params.add(value, mask)))
}

pub fn aggregate(values: &[MaskedValue], params: &GroupParams) -> u64 {
    values.iter().fold(0, |acc, v| params.add(acc, v.0))
}

pub fn encode_fixed(value: f64, params: &GroupParams) -> Result<u64> {
    let scaled = (value * FIXED_POINT_SCALE).round();
    if !(scaled >= 0.0 && scaled < params.modulus as f64) {
        return Err(Error::InvalidParameter(format!(
            "{value} cannot be fixed-point encoded in Z_{}",
            params.modulus
        )));
    }
    Ok(scaled as u64)
}

pub fn decode_fixed(encoded: u64) -> f64 {
    encoded as f64 / FIXED_POINT_SCALE
}

/// Which pairs of parties share a mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskTopology {
    /// Every pair of parties agrees on a key.
    Complete,
    /// Party `i` pairs with `i ± 1, …, i ± half_width` (mod n).
    Circulant { half_width: usize },
}

impl Default for MaskTopology {
    fn default() -> Self {
        MaskTopology::Circulant { half_width: 8 }
    }
}

impl MaskTopology {
    /// Peers of `party` among `count` parties, ascending.
    pub fn peers(&self, party: usize, count: usize) -> Vec<usize> {
        match *self {
            MaskTopology::Complete => (0..count).filter(|&j| j != party).collect(),
            MaskTopology::Circulant { half_width } => {
                if 2 * half_width + 1 >= count {
                    return MaskTopology::Complete.peers(party, count);
                }
                let mut peers: Vec<usize> = (1..=half_width)
                    .flat_map(|t| [(party + t) % count, (party + count - t) % count])
                    .collect();
                peers.sort_unstable();
                peers.dedup();
                peers
            }
        }
    }
}

/// One masked submission as delivered to the collector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskedReport {
    pub round: u64,
    pub party: usize,
    pub value: MaskedValue,
}

/// Key material of one secure-aggregation run over a fixed party set.
///
/// Each party generates a key pair and agrees on a shared key with every
/// peer once; every round then derives fresh one-time masks from those keys
/// and the round id. Both endpoints of a pair hold the same key and derive
/// the same scalar, so the simulation computes each pair once.
#[derive(Debug, Clone)]
pub struct AggregationSession {
    params: GroupParams,
    party_count: usize,
    /// `(i, j, k_ij)` with `i < j`.
    pairs: Vec<(usize, usize, u64)>,
}

impl AggregationSession {
    pub fn setup<R: Rng + ?Sized>(
        party_count: usize,
        params: GroupParams,
        topology: MaskTopology,
        rng: &mut R,
    ) -> Result<Self> {
        let keys: Vec<KeyPair> = (0..party_count).map(|_| ka_gen(&params, rng)).collect();
        let mut pairs = Vec::new();
        for i in 0..party_count {
            for j in topology.peers(i, party_count) {
                if j > i {
                    pairs.push((i, j, ka_agree(keys[i].secret, keys[j].public, &params)?));
                }
            }
        }
        Ok(AggregationSession {
            params,
            party_count,
            pairs,
        })
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn party_count(&self) -> usize {
        self.party_count
    }

    /// Masked submissions of all parties for one round, in party order.
    pub fn submit(&self, round: u64, values: &[u64]) -> Result<Vec<MaskedReport>> {
        if values.len() != self.party_count {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: self.party_count,
            });
        }
        let mut masks = vec![0u64; self.party_count];
        for &(i, j, key) in &self.pairs {
            let scalar = derive_mask_scalar(key, round, &self.params);
            masks[i] = self.params.add(masks[i], scalar);
            masks[j] = self.params.sub(masks[j], scalar);
        }
        values
            .iter()
            .zip(masks)
            .enumerate()
            .map(|(party, (&x, mask))| {
                Ok(MaskedReport {
                    round,
                    party,
                    value: mask_value(x, mask, &self.params)?,
                })
            })
            .collect()
    }

    /// Runs one round and returns what the collector learns: the sum.
    pub fn sum_round(&self, round: u64, values: &[u64]) -> Result<u64> {
        let reports = self.submit(round, values)?;
        let masked: Vec<MaskedValue> = reports.iter().map(|r| r.value).collect();
        Ok(aggregate(&masked, &self.params))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::ProtocolRng;
    use rand::SeedableRng;

    fn miller_rabin(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n.is_multiple_of(p) {
                return n == p;
            }
        }
        let (mut d, mut s) = (n - 1, 0);
        while d % 2 == 0 {
            d /= 2;
            s += 1;
        }
        let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
        let powmod = |mut b: u64, mut e: u64| {
            let mut r = 1u64;
            while e > 0 {
                if e & 1 == 1 {
                    r = mulmod(r, b);
                }
                b = mulmod(b, b);
                e >>= 1;
            }
            r
        };
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = powmod(a, d);
            if x == 1 || x == n - 1 {
                continue;
            }
            for _ in 1..s {
                x = mulmod(x, x);
                if x == n - 1 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn table_entries_are_largest_primes_of_their_size() {
        for (lambda, q, g) in GROUP_TABLE {
            assert!(miller_rabin(q), "λ={lambda}");
            assert_eq!(64 - q.leading_zeros(), lambda);
            let top = if lambda == 64 { u64::MAX } else { (1u64 << lambda) - 1 };
            assert!((q + 1..=top).all(|c| !miller_rabin(c)), "λ={lambda}");
            assert!(1 < g && g < q);
        }
    }

    #[test]
    fn lambda_61_is_mersenne_with_primitive_root() {
        let params = ka_param(61).unwrap();
        assert_eq!(params.modulus, (1u64 << 61) - 1);
        assert_eq!(params.generator, 37);
        // q - 1 = 2 * 3^2 * 5^2 * 7 * 11 * 13 * 31 * 41 * 61 * 151 * 331 * 1321
        let factors = [2u64, 3, 5, 7, 11, 13, 31, 41, 61, 151, 331, 1321];
        let order = params.modulus - 1;
        assert_eq!(
            2 * 9 * 25 * 7 * 11 * 13 * 31 * 41 * 61 * 151 * 331 * 1321u64,
            order
        );
        for f in factors {
            assert_ne!(params.pow(params.generator, order / f), 1);
        }
    }

    #[test]
    fn params_deterministic_and_floor() {
        assert_eq!(ka_param(61).unwrap(), ka_param(61).unwrap());
        assert!(matches!(ka_param(8), Err(Error::UnsupportedSecurityParameter(8))));
        assert!(ka_param(65).is_err());
    }

    #[test]
    fn agreement_is_symmetric() {
        let params = ka_param(61).unwrap();
        let mut rng = ProtocolRng::seed_from_u64(11);
        for _ in 0..100 {
            let a = ka_gen(&params, &mut rng);
            let b = ka_gen(&params, &mut rng);
            assert_eq!(
                ka_agree(a.secret, b.public, &params).unwrap(),
                ka_agree(b.secret, a.public, &params).unwrap()
            );
        }
        let b = ka_gen(&params, &mut rng);
        assert_eq!(ka_agree(0, b.public, &params).unwrap(), 1);
        assert_eq!(ka_agree(0, params.generator, &params).unwrap(), 1);
        assert!(ka_agree(3, 0, &params).is_err());
        assert!(ka_agree(3, params.modulus, &params).is_err());
    }

    #[test]
    fn two_party_masks_cancel() {
        let params = ka_param(61).unwrap();
        let key = 123_456_789;
        let m0 = compute_mask(0, &[1], &BTreeMap::from([(1, key)]), 0, &params).unwrap();
        let m1 = compute_mask(1, &[0], &BTreeMap::from([(0, key)]), 0, &params).unwrap();
        assert_eq!(m0, derive_mask_scalar(key, 0, &params));
        assert_eq!(params.add(m0, m1), 0);
        assert!(matches!(
            compute_mask(0, &[1, 2], &BTreeMap::from([(1, key)]), 0, &params),
            Err(Error::MissingSharedKey { party: 0, peer: 2 })
        ));
    }

    #[test]
    fn masks_telescope_to_zero() {
        let params = ka_param(61).unwrap();
        for topology in [MaskTopology::Complete, MaskTopology::Circulant { half_width: 2 }] {
            let mut rng = ProtocolRng::seed_from_u64(2);
            let session = AggregationSession::setup(13, params, topology, &mut rng).unwrap();
            let reports = session.submit(4, &[0; 13]).unwrap();
            let total = aggregate(&reports.iter().map(|r| r.value).collect::<Vec<_>>(), &params);
            assert_eq!(total, 0);
        }
    }

    #[test]
    fn three_party_masks_are_seed_deterministic() {
        let params = ka_param(61).unwrap();
        let run = |seed| {
            let mut rng = ProtocolRng::seed_from_u64(seed);
            AggregationSession::setup(3, params, MaskTopology::Complete, &mut rng)
                .unwrap()
                .submit(0, &[1, 2, 3])
                .unwrap()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5), run(6));
    }

    #[test]
    fn aggregate_examples() {
        let params = ka_param(61).unwrap();
        let mut rng = ProtocolRng::seed_from_u64(8);
        let session = AggregationSession::setup(3, params, MaskTopology::Complete, &mut rng).unwrap();
        assert_eq!(session.sum_round(0, &[3, 5, 7]).unwrap(), 15);

        let single = AggregationSession::setup(1, params, MaskTopology::Complete, &mut rng).unwrap();
        assert_eq!(single.submit(0, &[42]).unwrap()[0].value, MaskedValue(42));
        assert_eq!(single.sum_round(0, &[42]).unwrap(), 42);

        let values: Vec<u64> = (0..50).map(|_| rng.gen_range(0..1 << 16)).collect();
        let session = AggregationSession::setup(50, params, MaskTopology::Complete, &mut rng).unwrap();
        assert_eq!(session.sum_round(9, &values).unwrap(), values.iter().sum::<u64>());

        assert!(mask_value(params.modulus, 0, &params).is_err());
        assert!(session.sum_round(0, &[1, 2]).is_err());
    }

    #[test]
    fn circulant_peers_are_symmetric() {
        let topology = MaskTopology::Circulant { half_width: 3 };
        for count in [1, 2, 5, 7, 8, 20] {
            for i in 0..count {
                for j in topology.peers(i, count) {
                    assert_ne!(i, j);
                    assert!(topology.peers(j, count).contains(&i));
                }
            }
        }
        assert_eq!(topology.peers(0, 20), vec![1, 2, 3, 17, 18, 19]);
    }

    #[test]
    fn fixed_point_round_trip() {
        let params = ka_param(61).unwrap();
        for k in [0u64, 1, 999_999, 1_234_567_891, 2_305_843_009_000_000] {
            let v = k as f64 / FIXED_POINT_SCALE;
            assert_eq!(decode_fixed(encode_fixed(v, &params).unwrap()), v);
        }
        assert!(encode_fixed(-1.0, &params).is_err());
        assert!(encode_fixed(params.modulus as f64, &params).is_err());
    }

    #[test]
    fn single_masked_value_looks_uniform() {
        // chi-square over 10 buckets, 9 dof, critical value at 0.01 is 21.666
        let params = ka_param(61).unwrap();
        let runs = 5000;
        let mut buckets = [0usize; 10];
        let mut rng = ProtocolRng::seed_from_u64(77);
        for _ in 0..runs {
            let session =
                AggregationSession::setup(3, params, MaskTopology::Complete, &mut rng).unwrap();
            let y = session.submit(0, &[7, 7, 7]).unwrap()[0].value.0;
            buckets[(y as u128 * 10 / params.modulus as u128) as usize] += 1;
        }
        let expected = runs as f64 / 10.0;
        let chi2: f64 = buckets
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        assert!(chi2 < 21.666, "chi2 = {chi2}");
    }
}
