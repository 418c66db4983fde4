//! Per-record metric seeds that depend only on what the record is, not on
//! when the sweep reached it.

use crate::systems::SystemKind;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over (base seed, system name, parameter names and bit patterns,
/// tile index), finished with the splitmix64 mixer.
pub fn derive_seed(base_seed: u64, system: SystemKind, params: &[(String, f64)], tile: usize) -> u64 {
    let mut h = FNV_OFFSET;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(FNV_PRIME);
        }
    };
    eat(&base_seed.to_le_bytes());
    eat(system.name().as_bytes());
    for (k, v) in params {
        eat(&[0xff]);
        eat(k.as_bytes());
        eat(&v.to_bits().to_le_bytes());
    }
    eat(&(tile as u64).to_le_bytes());
    splitmix64(h)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
