//! Hash prefilter. Only the 32-bit symmetric high word of the pair hash is
//! computed here; survivors are decided exactly by the caller.

use wdrcm_core::fmix32;

const CHUNK: usize = 32;

#[inline(always)]
fn high(k32: u32, ga: u32, gb: u32) -> u32 {
    fmix32(ga.wrapping_mul(gb).wrapping_add(ga ^ gb) ^ k32)
}

#[inline(always)]
fn scan_impl(k32: u32, ga: u32, keys: &[u32], thr: &[u32], out: &mut Vec<u32>) {
    let n = keys.len().min(thr.len());
    let full = n - n % CHUNK;
    let mut c = 0;
    while c < full {
        let kk: &[u32; CHUNK] = keys[c..c + CHUNK].try_into().unwrap();
        let tt: &[u32; CHUNK] = thr[c..c + CHUNK].try_into().unwrap();
        // cheap branch-free count first; most chunks have no survivor
        let mut hits = 0u32;
        for k in 0..CHUNK {
            hits = hits.wrapping_add((high(k32, ga, kk[k]) <= tt[k]) as u32);
        }
        if hits != 0 {
            let mut mask = 0u32;
            for k in 0..CHUNK {
                mask |= ((high(k32, ga, kk[k]) <= tt[k]) as u32) << k;
            }
            while mask != 0 {
                out.push((c + mask.trailing_zeros() as usize) as u32);
                mask &= mask - 1;
            }
        }
        c += CHUNK;
    }
    for k in full..n {
        if high(k32, ga, keys[k]) <= thr[k] {
            out.push(k as u32);
        }
    }
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn scan_avx2(k32: u32, ga: u32, keys: &[u32], thr: &[u32], out: &mut Vec<u32>) {
    scan_impl(k32, ga, keys, thr, out)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn scan_avx512(k32: u32, ga: u32, keys: &[u32], thr: &[u32], out: &mut Vec<u32>) {
    scan_impl(k32, ga, keys, thr, out)
}

/// Pushes every index `k` with `high(ga, keys[k]) <= thr[k]`.
pub(crate) fn scan_row(k32: u32, ga: u32, keys: &[u32], thr: &[u32], out: &mut Vec<u32>) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::is_x86_feature_detected!("avx512f") {
            // SAFETY: the CPU supports AVX-512F, checked just above.
            unsafe { scan_avx512(k32, ga, keys, thr, out) };
            return;
        }
        if std::is_x86_feature_detected!("avx2") {
            // SAFETY: the CPU supports AVX2, checked just above.
            unsafe { scan_avx2(k32, ga, keys, thr, out) };
            return;
        }
    }
    scan_impl(k32, ga, keys, thr, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wdrcm_core::{PairHasher, SeedSpec};

    #[test]
    fn agrees_with_hasher() {
        let h = PairHasher::new(&SeedSpec::new(5));
        let keys: Vec<u32> = (0..1000).map(|i| h.vertex_key(i)).collect();
        let thr: Vec<u32> = (0..1000).map(|i| PairHasher::high_threshold((i % 7) as f64 / 10.0)).collect();
        let ga = h.vertex_key(5000);
        let mut out = Vec::new();
        scan_row(h.mix_key(), ga, &keys, &thr, &mut out);
        let want: Vec<u32> = (0..1000u32).filter(|&k| h.high(ga, keys[k as usize]) <= thr[k as usize]).collect();
        assert_eq!(out, want);
        out.clear();
        scan_impl(h.mix_key(), ga, &keys, &thr, &mut out);
        assert_eq!(out, want);
    }
}
