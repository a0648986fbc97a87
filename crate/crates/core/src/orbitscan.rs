//! Orbit partitions of singular projective points, stabilizer orders,
//! twisted conjugacy classes and the diagonal double-coset scan.
//!
//! Vectors are packed into a u64: coordinate i occupies `w` bits starting at
//! bit `i * w`, split into `k` base-p digit lanes of `b` bits each. Addition is
//! lane-wise mod p (plain XOR when p = 2). Linear maps are applied through
//! per-chunk lookup tables.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::cases::{InvariantKind, ModuleCase};
use crate::error::{OrbitaError, Result};
use crate::field::{Field, FieldSpec};
use crate::groups::{Automorphism, SmallGroup};
use crate::matrix::{Matrix, Spectrum};
use crate::quadform::{infer_quadric_type, QuadraticForm, QuadricType};

/// Hard ceiling on the number of projective points a scan may index.
pub const MAX_POINTS: u64 = 1 << 32;

/// Invariants attached to an orbit, rendered as strings.
pub type Invariants = BTreeMap<String, String>;

#[derive(Clone, Debug)]
pub struct Packing {
    p: u32,
    n: usize,
    lane_bits: u32,
    coord_bits: u32,
    // top bit of every used lane, and 2^(b-1) - p in every used lane
    high: u64,
    bias: u64,
    decode: Vec<u32>,
    encode: Vec<u64>,
    // coordinate index by trailing-zero count
    lead_of: [u8; 64],
}

impl Packing {
    pub fn new(field: &FieldSpec, n: usize) -> Option<Packing> {
        let (p, k) = (field.p(), field.k());
        let lane_bits = if p == 2 { 1 } else { 32 - (p - 1).leading_zeros() + 1 };
        let coord_bits = lane_bits * k;
        if coord_bits as usize * n > 64 || coord_bits > 12 || n == 0 {
            return None;
        }
        let mut high = 0u64;
        let mut bias = 0u64;
        if p != 2 {
            for lane in 0..(n as u32 * k) {
                let off = lane * lane_bits;
                high |= 1u64 << (off + lane_bits - 1);
                bias |= ((1u64 << (lane_bits - 1)) - p as u64) << off;
            }
        }
        let mut decode = vec![0u32; 1 << coord_bits];
        let mut encode = vec![0u64; field.q() as usize];
        for e in 0..field.q() {
            let mut bits = 0u64;
            for (d, &c) in field.coefficients(e).iter().enumerate() {
                bits |= (c as u64) << (d as u32 * lane_bits);
            }
            encode[e as usize] = bits;
            decode[bits as usize] = e;
        }
        let mut lead_of = [0u8; 64];
        for (tz, l) in lead_of.iter_mut().enumerate() {
            *l = (tz as u32 / coord_bits) as u8;
        }
        Some(Packing {
            p,
            n,
            lane_bits,
            coord_bits,
            high,
            bias,
            decode,
            encode,
            lead_of,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn coord_mask(&self) -> u64 {
        (1u64 << self.coord_bits) - 1
    }

    pub fn pack(&self, coords: &[u32]) -> u64 {
        coords
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &c)| acc | self.encode[c as usize] << (i as u32 * self.coord_bits))
    }

    pub fn coord(&self, v: u64, i: usize) -> u32 {
        self.decode[((v >> (i as u32 * self.coord_bits)) & self.coord_mask()) as usize]
    }

    pub fn unpack(&self, v: u64) -> Vec<u32> {
        (0..self.n).map(|i| self.coord(v, i)).collect()
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        if self.p == 2 {
            return a ^ b;
        }
        let s = a + b;
        let over = ((s + self.bias) & self.high) >> (self.lane_bits - 1);
        s - over * self.p as u64
    }

    /// Index of the first nonzero coordinate; v must be nonzero.
    #[inline]
    pub fn lead(&self, v: u64) -> usize {
        self.lead_of[(v.trailing_zeros() & 63) as usize] as usize
    }
}

/// A linear map on packed vectors, v -> M v.
#[derive(Clone, Debug)]
pub struct PackedMap {
    chunks: Vec<(u32, u64, Vec<u64>)>,
}

impl PackedMap {
    pub fn new(packing: &Packing, field: &FieldSpec, m: &Matrix) -> PackedMap {
        let n = packing.n;
        let per = ((12 / packing.coord_bits) as usize).max(1);
        let mut chunks = Vec::new();
        let mut start = 0;
        while start < n {
            let len = per.min(n - start);
            let shift = start as u32 * packing.coord_bits;
            let bits = len as u32 * packing.coord_bits;
            let mut table = vec![0u64; 1 << bits];
            let mut digits = vec![0u32; len];
            loop {
                let mut v = vec![0u32; n];
                v[start..start + len].copy_from_slice(&digits);
                let key = (packing.pack(&v) >> shift) as usize;
                table[key] = packing.pack(&m.apply(&v));
                if !crate::quadform::increment(&mut digits, field.q()) {
                    break;
                }
            }
            chunks.push((shift, (1u64 << bits) - 1, table));
            start += len;
        }
        PackedMap { chunks }
    }

    #[inline]
    pub fn apply(&self, packing: &Packing, v: u64) -> u64 {
        let mut acc = 0u64;
        for (shift, mask, table) in &self.chunks {
            acc = packing.add(acc, table[((v >> shift) & mask) as usize]);
        }
        acc
    }
}

/// Dense numbering of projective points: canonical points (first nonzero
/// coordinate 1) in increasing base-q order, coordinate 0 most significant.
#[derive(Clone, Debug)]
pub struct PointIndexer {
    packing: Packing,
    q: u64,
    total: u64,
    value_chunks: Vec<(u32, u64, Vec<u64>)>,
    // value tables of s·v for each scalar s, when small enough
    scaled: Option<Vec<Vec<(u32, u64, Vec<u64>)>>>,
    // wrapping offset per lead position
    offsets: Vec<u64>,
    scalers: Vec<PackedMap>,
    inverse: Vec<u32>,
}

impl PointIndexer {
    pub fn new(field: &Field, n: usize) -> Result<PointIndexer> {
        let packing = Packing::new(field, n).ok_or_else(|| {
            OrbitaError::Budget(format!(
                "vectors of dimension {n} over GF({}) do not fit the 64-bit packed key",
                field.q()
            ))
        })?;
        let q = field.q() as u64;
        let total = q
            .checked_pow(n as u32)
            .map(|x| (x - 1) / (q - 1))
            .ok_or_else(|| OrbitaError::Budget("point count overflows 64 bits".into()))?;
        let per = ((12 / packing.coord_bits) as usize).max(1);
        let value_tables = |s: u32| {
            let mut chunks = Vec::new();
            let mut start = 0;
            while start < n {
                let len = per.min(n - start);
                let shift = start as u32 * packing.coord_bits;
                let bits = len as u32 * packing.coord_bits;
                let mut table = vec![0u64; 1 << bits];
                let mut digits = vec![0u32; len];
                loop {
                    let mut v = vec![0u32; n];
                    v[start..start + len].copy_from_slice(&digits);
                    let key = (packing.pack(&v) >> shift) as usize;
                    table[key] = v.iter().fold(0u64, |acc, &c| acc * q + field.mul(s, c) as u64);
                    if !crate::quadform::increment(&mut digits, field.q()) {
                        break;
                    }
                }
                chunks.push((shift, (1u64 << bits) - 1, table));
                start += len;
            }
            chunks
        };
        let value_chunks = value_tables(1);
        let entries: usize = value_chunks.iter().map(|c| c.2.len()).sum::<usize>() * (q as usize - 1);
        let scaled = (entries <= 1 << 21).then(|| (0..field.q()).map(value_tables).collect());
        let offsets = (0..n)
            .map(|lead| {
                let t = (n - 1 - lead) as u32;
                let qt = q.pow(t);
                ((qt - 1) / (q - 1)).wrapping_sub(qt)
            })
            .collect();
        let mut scalers = Vec::with_capacity(field.q() as usize);
        let mut inverse = vec![0u32; field.q() as usize];
        for s in 0..field.q() {
            scalers.push(PackedMap::new(
                &packing,
                field,
                &Matrix::identity(field, n).scale(s),
            ));
            if s != 0 {
                inverse[s as usize] = field.inv(s).unwrap();
            }
        }
        Ok(PointIndexer {
            packing,
            q,
            total,
            value_chunks,
            scaled,
            offsets,
            scalers,
            inverse,
        })
    }

    pub fn packing(&self) -> &Packing {
        &self.packing
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Scale a nonzero packed vector so its first nonzero coordinate is 1.
    #[inline]
    pub fn canonical(&self, v: u64) -> u64 {
        let lead = self.packing.lead(v);
        let c = self.packing.coord(v, lead);
        if c == 1 {
            v
        } else {
            self.scalers[self.inverse[c as usize] as usize].apply(&self.packing, v)
        }
    }

    /// Dense index of the point spanned by any nonzero packed vector.
    #[inline]
    pub fn point_index(&self, v: u64) -> u64 {
        let Some(tables) = &self.scaled else {
            return self.index(self.canonical(v));
        };
        let lead = self.packing.lead(v);
        let s = self.inverse[self.packing.coord(v, lead) as usize] as usize;
        let mut value = 0u64;
        for (shift, mask, table) in &tables[s] {
            value += table[((v >> shift) & mask) as usize];
        }
        value.wrapping_add(self.offsets[lead])
    }

    /// Dense index of a canonical packed vector.
    #[inline]
    pub fn index(&self, v: u64) -> u64 {
        let mut value = 0u64;
        for (shift, mask, table) in &self.value_chunks {
            value += table[((v >> shift) & mask) as usize];
        }
        value.wrapping_add(self.offsets[self.packing.lead(v)])
    }

    /// Canonical coordinates of the point with the given dense index.
    pub fn coords(&self, mut idx: u64) -> Vec<u32> {
        let n = self.packing.n;
        let mut t = 0u32;
        let mut block = 1u64;
        while idx >= block {
            idx -= block;
            t += 1;
            block *= self.q;
        }
        let lead = n - 1 - t as usize;
        let mut v = vec![0u32; n];
        v[lead] = 1;
        for i in (lead + 1..n).rev() {
            v[i] = (idx % self.q) as u32;
            idx /= self.q;
        }
        v
    }
}

/// One bit per projective point.
pub struct Bitmap {
    words: Vec<AtomicU64>,
}

impl Bitmap {
    pub fn new(bits: u64) -> Bitmap {
        let n = bits.div_ceil(64) as usize;
        Bitmap {
            words: (0..n).map(|_| AtomicU64::new(0)).collect(),
        }
    }

    /// Clear a bit; true when it was set.
    #[inline]
    pub fn take(&self, i: u64) -> bool {
        let bit = 1u64 << (i & 63);
        let w = &self.words[(i >> 6) as usize];
        // a plain load first: locked instructions would serialize the cache misses
        w.load(Ordering::Relaxed) & bit != 0 && w.fetch_and(!bit, Ordering::Relaxed) & bit != 0
    }

    /// Set a bit; true when it was clear.
    #[inline]
    pub fn mark(&self, i: u64) -> bool {
        let bit = 1u64 << (i & 63);
        let w = &self.words[(i >> 6) as usize];
        w.load(Ordering::Relaxed) & bit == 0 && w.fetch_or(bit, Ordering::Relaxed) & bit == 0
    }

    /// Hint that bit `i` is about to be probed.
    #[inline]
    pub fn prefetch(&self, i: u64) {
        #[cfg(target_arch = "x86_64")]
        {
            let p = self.words[(i >> 6) as usize].as_ptr() as *const i8;
            // SAFETY: prefetching is a hint and never faults; p points into the live slice
            unsafe { std::arch::x86_64::_mm_prefetch::<{ std::arch::x86_64::_MM_HINT_T0 }>(p) };
        }
        #[cfg(not(target_arch = "x86_64"))]
        let _ = i;
    }

    fn or_word(&self, w: usize, bits: u64) {
        self.words[w].fetch_or(bits, Ordering::Relaxed);
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| w.load(Ordering::Relaxed).count_ones() as u64).sum()
    }

    /// First set bit at or after `from`.
    pub fn next_set(&self, from: u64) -> Option<u64> {
        let mut w = (from >> 6) as usize;
        if w >= self.words.len() {
            return None;
        }
        let first = self.words[w].load(Ordering::Relaxed) & (!0u64 << (from & 63));
        if first != 0 {
            return Some(((w as u64) << 6) + first.trailing_zeros() as u64);
        }
        w += 1;
        while w < self.words.len() {
            let x = self.words[w].load(Ordering::Relaxed);
            if x != 0 {
                return Some(((w as u64) << 6) + x.trailing_zeros() as u64);
            }
            w += 1;
        }
        None
    }
}

/// Set the bits of all singular points and return their number.
pub fn mark_singular(form: &QuadraticForm, indexer: &PointIndexer, bitmap: &Bitmap) -> u64 {
    let f = form.field().clone();
    let n = form.dim();
    let q = f.q() as u64;
    let gram = form.polar_gram();
    // lo block: the last t coordinates, with q^t at most 2^16
    let mut t_max = 0usize;
    while t_max < n - 1 && q.pow(t_max as u32 + 1) <= 1 << 16 {
        t_max += 1;
    }
    let lo_tables: Vec<Vec<u32>> = (0..=t_max)
        .map(|t| {
            let mut table = Vec::with_capacity(q.pow(t as u32) as usize);
            let mut v = vec![0u32; n];
            let mut digits = vec![0u32; t];
            loop {
                v[n - t..].copy_from_slice(&digits);
                table.push(form.eval_unchecked(&v));
                if !crate::quadform::increment(&mut digits, f.q()) {
                    break;
                }
            }
            table
        })
        .collect();
    for lead in 0..n {
        let r = n - 1 - lead;
        let t = r.min(t_max);
        let h = r - t;
        let block = q.pow(t as u32);
        let base = indexer.offsets[lead].wrapping_add(q.pow(r as u32));
        let ql = &lo_tables[t];
        (0..q.pow(h as u32)).into_par_iter().for_each_init(
            || (vec![0u32; block as usize], vec![0u32; n]),
            |(lin, v), hi| {
                v.iter_mut().for_each(|x| *x = 0);
                v[lead] = 1;
                let mut rest = hi;
                for i in (lead + 1..lead + 1 + h).rev() {
                    v[i] = (rest % q) as u32;
                    rest /= q;
                }
                let target = f.neg(form.eval_unchecked(v));
                // polar pairing of the hi part with each lo coordinate
                let coef: Vec<u32> = (n - t..n)
                    .map(|j| (0..n - t).fold(0, |acc, i| f.add(acc, f.mul(v[i], gram.get(i, j)))))
                    .collect();
                lin[0] = 0;
                let mut len = 1usize;
                for &c in &coef {
                    for x in (0..len).rev() {
                        let b = lin[x];
                        for d in 0..f.q() {
                            lin[x * q as usize + d as usize] = f.add(b, f.mul(d, c));
                        }
                    }
                    len *= q as usize;
                }
                let start = base + hi * block;
                let mut word_idx = (start >> 6) as usize;
                let mut word = 0u64;
                for l in 0..block {
                    let pos = start + l;
                    if (pos >> 6) as usize != word_idx {
                        if word != 0 {
                            bitmap.or_word(word_idx, word);
                        }
                        word_idx = (pos >> 6) as usize;
                        word = 0;
                    }
                    if f.add(ql[l as usize], lin[l as usize]) == target {
                        word |= 1u64 << (pos & 63);
                    }
                }
                if word != 0 {
                    bitmap.or_word(word_idx, word);
                }
            },
        );
    }
    bitmap.count()
}

/// Generators prepared for the packed engine.
pub struct PackedAction {
    pub indexer: PointIndexer,
    pub maps: Vec<PackedMap>,
}

impl PackedAction {
    pub fn new(case: &ModuleCase) -> Result<PackedAction> {
        let indexer = PointIndexer::new(&case.field, case.dim)?;
        let maps = case
            .gens
            .iter()
            .map(|g| PackedMap::new(indexer.packing(), &case.field, g))
            .collect();
        Ok(PackedAction { indexer, maps })
    }

    /// Breadth-first closure from a canonical packed vector. `claim` returns
    /// true the first time a point index is seen. Returns the orbit size and up
    /// to `want` sample vectors (deterministic).
    pub fn closure(
        &self,
        start: u64,
        bitmap: &Bitmap,
        claim: &(dyn Fn(u64) -> bool + Sync),
        want: usize,
    ) -> (u64, Vec<u64>) {
        let mut frontier = vec![start];
        let mut size = 1u64;
        let mut samples = vec![start];
        while !frontier.is_empty() {
            let next: Vec<u64> = frontier
                .par_chunks(4096)
                .flat_map_iter(|chunk| {
                    let mut images = Vec::with_capacity(chunk.len() * self.maps.len());
                    for &v in chunk {
                        for m in &self.maps {
                            // frontier vectors are kept up to scalars
                            let w = m.apply(self.indexer.packing(), v);
                            let i = self.indexer.point_index(w);
                            bitmap.prefetch(i);
                            images.push((w, i));
                        }
                    }
                    images.retain(|&(_, i)| claim(i));
                    images.into_iter().map(|(w, _)| w)
                })
                .collect();
            size += next.len() as u64;
            if samples.len() < want && !next.is_empty() {
                let mut level: Vec<u64> = next.iter().map(|&w| self.indexer.canonical(w)).collect();
                level.sort_unstable_by_key(|&w| self.indexer.index(w));
                samples.extend(level.into_iter().take(want - samples.len()));
            }
            frontier = next;
        }
        (size, samples)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub size: u64,
    pub rep: Vec<u32>,
    #[serde(skip)]
    pub rep_index: u64,
    #[serde(serialize_with = "serialize_big")]
    pub stab_order: BigUint,
    pub invariants: Invariants,
}

pub fn serialize_big<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    match x.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&x.to_string()),
    }
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    pub case: String,
    pub q: u32,
    pub form_type: QuadricType,
    pub total_singular: u64,
    pub orbits: Vec<OrbitRecord>,
    pub elapsed_ms: u128,
}

impl OrbitReport {
    /// The report document, schema "orbita-report/1".
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": "orbita-report/1",
            "case": self.case,
            "q": self.q,
            "form_type": self.form_type,
            "total_singular": self.total_singular,
            "orbits": self.orbits,
            "elapsed_ms": self.elapsed_ms as u64,
        })
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.orbits.iter().map(|o| o.size).collect()
    }

    pub fn stabilizers(&self) -> Vec<BigUint> {
        self.orbits.iter().map(|o| o.stab_order.clone()).collect()
    }
}

/// Configuration for a scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanOptions {
    /// Largest number of projective points the scan may index.
    pub budget: u64,
    /// Samples per orbit on which invariants are checked for constancy.
    pub samples: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            budget: MAX_POINTS,
            samples: 1000,
        }
    }
}

/// Number of projective points of the case's space, if it fits in u64.
pub fn point_count(case: &ModuleCase) -> Option<u64> {
    let q = case.q() as u64;
    q.checked_pow(case.dim as u32).map(|x| (x - 1) / (q - 1))
}

fn check_budget(case: &ModuleCase, budget: u64) -> Result<()> {
    let limit = budget.min(MAX_POINTS);
    match point_count(case) {
        Some(c) if c <= limit => Ok(()),
        Some(c) => Err(OrbitaError::Budget(format!(
            "{} over GF({}) has {c} projective points, above the budget of {limit}",
            case.id,
            case.q()
        ))),
        None => Err(OrbitaError::Budget(format!(
            "{} over GF({}) has more than 2^64 projective points",
            case.id,
            case.q()
        ))),
    }
}

/// Rank of a point viewed as an m x n matrix.
fn tensor_rank(f: &Field, rows: usize, cols: usize, v: &[u32]) -> Result<usize> {
    Ok(Matrix::from_raw(f, rows, cols, v.to_vec())?.rank())
}

/// Class of a lifted matrix: nilpotent, shift-nilpotent, semisimple or mixed.
pub fn matrix_class(m: &Matrix, quotient_by_scalars: bool) -> Result<&'static str> {
    let mp = m.minimal_polynomial()?;
    if mp.is_monomial() {
        return Ok("nilpotent");
    }
    if mp.single_root().is_some() {
        return Ok(if quotient_by_scalars { "nilpotent" } else { "shift-nilpotent" });
    }
    Ok(if mp.is_squarefree() { "semisimple" } else { "mixed" })
}

/// Per-orbit invariants of a point.
pub fn point_invariants(case: &ModuleCase, v: &[u32]) -> Result<Invariants> {
    let mut out = Invariants::new();
    match case.invariants {
        InvariantKind::None => {}
        InvariantKind::TensorRank { rows, cols } => {
            out.insert("rank".into(), tensor_rank(&case.field, rows, cols, v)?.to_string());
        }
        InvariantKind::LiftedMatrix { quotient_by_scalars, .. } => {
            let m = case
                .lift_matrix(v)
                .ok_or_else(|| OrbitaError::Consistency("point does not lift".into()))?;
            out.insert("class".into(), matrix_class(&m, quotient_by_scalars)?.into());
        }
    }
    Ok(out)
}

fn thread_pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t.max(1));
    }
    b.build().map_err(|e| OrbitaError::Usage(format!("thread pool: {e}")))
}

/// Full orbit partition of the singular points of a case.
pub fn orbit_partition(case: &ModuleCase, opts: ScanOptions, threads: Option<usize>) -> Result<OrbitReport> {
    check_budget(case, opts.budget)?;
    let started = Instant::now();
    let pool = thread_pool(threads)?;
    pool.install(|| {
        let action = PackedAction::new(case)?;
        let bitmap = Bitmap::new(action.indexer.total());
        let total_singular = mark_singular(&case.form, &action.indexer, &bitmap);
        let effective = case.effective_order();
        let mut orbits = Vec::new();
        let mut from = 0;
        let claim = |i: u64| bitmap.take(i);
        while let Some(start_idx) = bitmap.next_set(from) {
            from = start_idx + 1;
            bitmap.take(start_idx);
            let rep = action.indexer.coords(start_idx);
            let start = action.indexer.packing().pack(&rep);
            let (size, samples) = action.closure(start, &bitmap, &claim, opts.samples);
            let (stab, rem) = effective.div_rem(&BigUint::from(size));
            if !rem.is_zero() {
                return Err(OrbitaError::Consistency(format!(
                    "{}: orbit size {size} does not divide the group order {effective}",
                    case.id
                )));
            }
            let invariants = point_invariants(case, &rep)?;
            for s in &samples {
                let coords = action.indexer.packing().unpack(*s);
                if point_invariants(case, &coords)? != invariants {
                    return Err(OrbitaError::Consistency(format!(
                        "{}: invariants vary along the orbit of {:?}",
                        case.id, rep
                    )));
                }
            }
            orbits.push(OrbitRecord {
                size,
                rep,
                rep_index: start_idx,
                stab_order: stab,
                invariants,
            });
        }
        let sum: u64 = orbits.iter().map(|o| o.size).sum();
        if sum != total_singular {
            return Err(OrbitaError::Consistency(format!(
                "{}: orbit sizes sum to {sum}, singular count is {total_singular}",
                case.id
            )));
        }
        orbits.sort_by_key(|o| (o.size, o.rep_index));
        let form_type = infer_quadric_type(case.dim, case.q(), &BigUint::from(total_singular))?;
        Ok(OrbitReport {
            case: case.id.clone(),
            q: case.q(),
            form_type,
            total_singular,
            orbits,
            elapsed_ms: started.elapsed().as_millis(),
        })
    })
}

/// Orbit of one point: its size and its least dense index (which names the
/// orbit in a full partition).
pub fn orbit_of(case: &ModuleCase, point: &[u32], opts: ScanOptions, threads: Option<usize>) -> Result<(u64, u64)> {
    check_budget(case, opts.budget)?;
    if point.iter().all(|&x| x == 0) {
        return Err(OrbitaError::Usage("the zero vector is not a point".into()));
    }
    let pool = thread_pool(threads)?;
    pool.install(|| {
        let action = PackedAction::new(case)?;
        let bitmap = Bitmap::new(action.indexer.total());
        let ix = &action.indexer;
        let start = ix.canonical(ix.packing().pack(point));
        bitmap.mark(ix.index(start));
        let claim = |i: u64| bitmap.mark(i);
        let (size, _) = action.closure(start, &bitmap, &claim, 0);
        let least = bitmap.next_set(0).unwrap_or(0);
        Ok((size, least))
    })
}

/// Effective group order divided by the orbit size of the point.
pub fn stabilizer_order(case: &ModuleCase, point: &[u32], opts: ScanOptions, threads: Option<usize>) -> Result<BigUint> {
    let (size, _) = orbit_of(case, point, opts, threads)?;
    let (stab, rem) = case.effective_order().div_rem(&BigUint::from(size));
    if !rem.is_zero() {
        return Err(OrbitaError::Consistency(format!(
            "orbit size {size} does not divide {}",
            case.effective_order()
        )));
    }
    Ok(stab)
}

// ---------------------------------------------------------------------------
// Twisted conjugacy.

#[derive(Clone, Debug, Serialize)]
pub struct TwistedClass {
    pub size: usize,
    pub centralizer: usize,
    pub representative: Vec<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedClassReport {
    pub group: String,
    pub sigma: String,
    pub classes: Vec<TwistedClass>,
}

/// Classes of x ~ z⁻¹ x σ(z).
pub fn twisted_classes(g: &SmallGroup) -> Result<TwistedClassReport> {
    g.check_automorphism()?;
    let n = g.order();
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut members = BTreeSet::new();
        for z in 0..n {
            let y = g.table[g.table[g.inverse(z)][x]][g.sigma[z]];
            members.insert(y);
        }
        for &m in &members {
            seen[m] = true;
        }
        let size = members.len();
        if n % size != 0 {
            return Err(OrbitaError::Consistency("class size does not divide the group order".into()));
        }
        classes.push(TwistedClass {
            size,
            centralizer: n / size,
            representative: g.elements[x].clone(),
        });
    }
    classes.sort_by(|a, b| b.centralizer.cmp(&a.centralizer).then(a.representative.cmp(&b.representative)));
    Ok(TwistedClassReport {
        group: g.name.clone(),
        sigma: g.sigma_name.clone(),
        classes,
    })
}

/// The named small groups with their standard twists.
pub fn twisted_example(name: &str, outer: bool) -> Result<TwistedClassReport> {
    let g = SmallGroup::by_name(name)?;
    let g = if outer {
        g.with_automorphism(Automorphism::ConjugationBy(vec![1, 0, 2, 3]))?
    } else {
        g
    };
    twisted_classes(&g)
}

// ---------------------------------------------------------------------------
// Double cosets in the Sp6 x Sp6 setting.

/// The antidiagonal symplectic matrix J.
fn tau_matrix(field: &Field, n: usize) -> Result<Matrix> {
    crate::groups::symplectic_gram(field, n)
}

/// τ(g) = J⁻¹ g^{-T} J.
pub fn tau(g: &Matrix) -> Result<Matrix> {
    let f = g.field();
    let n = g.rows();
    if n % 2 == 1 {
        return Err(OrbitaError::Usage("τ needs even degree".into()));
    }
    let ginv = g
        .inverse()
        .ok_or_else(|| OrbitaError::Usage("τ of a singular matrix".into()))?;
    let j = tau_matrix(f, n)?;
    let jinv = j.inverse().unwrap();
    Ok(jinv.mul(&ginv.transpose()).mul(&j))
}

/// Eigenvalues of τ(g⁻¹)g, found in GF(q^e) for the least e that splits it.
pub fn tau_invariant(g: &Matrix) -> Result<Spectrum> {
    let ginv = g
        .inverse()
        .ok_or_else(|| OrbitaError::Usage("τ of a singular matrix".into()))?;
    let m = tau(&ginv)?.mul(g);
    for e in 1..=g.rows() as u32 {
        if let Some(Spectrum::Split { field_order, values }) = m.eigenvalue_multiset(e).ok() {
            return Ok(Spectrum::Split { field_order, values });
        }
    }
    Ok(Spectrum::NotSplit)
}

#[derive(Clone, Debug, Serialize)]
pub struct DiagonalScan {
    pub q: u32,
    pub singular_elements: u64,
    pub distinct_spectra: usize,
}

/// Singular diagonal SL6 elements: spectra of τ(A⁻¹)A, which for a diagonal A
/// is diag(d1d6, d2d5, d3d4, d3d4, d2d5, d1d6).
pub fn scan_diagonal_cosets(q: u32) -> Result<DiagonalScan> {
    let f = FieldSpec::new(q)?;
    let units: Vec<u32> = (1..q).collect();
    let mut spectra = BTreeSet::new();
    let mut count = 0u64;
    let mut d = [0u32; 5];
    let m = units.len();
    let mut idx = [0usize; 5];
    loop {
        for (x, &i) in d.iter_mut().zip(&idx) {
            *x = units[i];
        }
        let prod = d.iter().fold(1, |a, &x| f.mul(a, x));
        let d6 = f.inv(prod).unwrap();
        let a = f.mul(d[0], d6);
        let b = f.mul(d[1], d[4]);
        let c = f.mul(d[2], d[3]);
        if f.add(f.add(a, b), c) == 0 {
            count += 1;
            let mut s = [a, a, b, b, c, c];
            s.sort_unstable();
            spectra.insert(s);
        }
        let mut pos = 0;
        loop {
            if pos == 5 {
                return Ok(DiagonalScan {
                    q,
                    singular_elements: count,
                    distinct_spectra: spectra.len(),
                });
            }
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::build_case;

    #[test]
    fn packing_round_trip_and_add() {
        for q in [2u32, 3, 4, 5, 7, 9, 13] {
            let f = FieldSpec::new(q).unwrap();
            let p = Packing::new(&f, 4).unwrap();
            let a = [1u32 % q, (q - 1), 0, q / 2];
            let b = [q - 1, 1 % q, q / 3, q - 1];
            let pa = p.pack(&a);
            assert_eq!(p.unpack(pa), a.to_vec());
            let sum: Vec<u32> = a.iter().zip(&b).map(|(&x, &y)| f.add(x, y)).collect();
            assert_eq!(p.unpack(p.add(pa, p.pack(&b))), sum);
        }
    }

    #[test]
    fn dense_index_is_bijective() {
        let f = FieldSpec::new(3).unwrap();
        let ix = PointIndexer::new(&f, 4).unwrap();
        assert_eq!(ix.total(), 40);
        for i in 0..ix.total() {
            let c = ix.coords(i);
            assert_eq!(ix.index(ix.packing().pack(&c)), i);
        }
    }

    #[test]
    fn singular_marking_matches_count() {
        for (id, q) in [("A1-sym4", 5), ("A2-adjoint", 2), ("B2-adjoint", 3)] {
            let c = build_case(id, q, None).unwrap();
            let ix = PointIndexer::new(&c.field, c.dim).unwrap();
            let bm = Bitmap::new(ix.total());
            let n = mark_singular(&c.form, &ix, &bm);
            assert_eq!(n, c.form.count_singular_points(1 << 24).unwrap(), "{id}");
        }
    }

    #[test]
    fn sym4_q5_partition() {
        let c = build_case("A1-sym4", 5, None).unwrap();
        let r = orbit_partition(&c, ScanOptions::default(), Some(1)).unwrap();
        assert_eq!(r.sizes(), vec![6, 30, 60, 60]);
    }

    #[test]
    fn twisted_alt4() {
        let r = twisted_example("Alt4", false).unwrap();
        let cents: Vec<usize> = r.classes.iter().map(|c| c.centralizer).collect();
        assert_eq!(cents, vec![12, 4, 3, 3]);
        let r = twisted_example("Alt4", true).unwrap();
        let cents: Vec<usize> = r.classes.iter().map(|c| c.centralizer).collect();
        assert_eq!(cents, vec![2, 2]);
    }

    #[test]
    fn tau_involution() {
        let f = FieldSpec::new(7).unwrap();
        let g = Matrix::from_ints(
            &f,
            &[
                vec![1, 2, 0, 0, 0, 1],
                vec![0, 1, 0, 3, 0, 0],
                vec![0, 0, 1, 0, 0, 0],
                vec![0, 0, 0, 1, 0, 0],
                vec![0, 0, 5, 0, 1, 0],
                vec![0, 0, 0, 0, 0, 1],
            ],
        )
        .unwrap();
        assert_eq!(tau(&tau(&g).unwrap()).unwrap(), g);
    }
}
