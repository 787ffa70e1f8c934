//! Named OA constructions, the asset registry, and the symmetric resolver.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::array::{multiply_oa, Certificate, MixedLevelArray};
use crate::error::{Error, Result};
use crate::field::{factorize_prime_powers, poly_eval, prime_power, Field};
use crate::scheme::DifferenceScheme;
use crate::DEFAULT_BUDGET;

/// Rows are the polynomials of degree < t over GF(s); columns are the
/// evaluations at every field element followed by the coefficient of
/// x^(t-1). An OA(s^t, s+1, s, t) of index one.
pub fn bush(s: u32, t: u32, budget: u64) -> Result<MixedLevelArray> {
    let f = Field::new(s)?;
    if t == 0 {
        return Err(Error::BadParameter("bush needs t >= 1".into()));
    }
    if t - 1 > s {
        return Err(Error::StrengthTooHigh { s, t });
    }
    let n = s as usize + 1;
    let r = (s as u64).pow(t);
    let mut data = Vec::with_capacity(r as usize * n);
    let mut coeffs = vec![0u32; t as usize];
    for idx in 0..r {
        let mut x = idx;
        for c in coeffs.iter_mut() {
            *c = (x % s as u64) as u32;
            x /= s as u64;
        }
        data.extend((0..s).map(|alpha| poly_eval(&f, &coeffs, alpha)));
        data.push(coeffs[t as usize - 1]);
    }
    MixedLevelArray::new(vec![s; n], data)?.certify(t.min(n as u32), budget)
}

/// Rows (a2, a1, a0) ∈ GF(s)³; columns a2, a1 and a2·α² + a1·α + a0 for
/// every α. An OA(s³, s+2, s, 3) when s is a power of two.
pub fn hyperoval_oa(s: u32, budget: u64) -> Result<MixedLevelArray> {
    if s < 2 || !s.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(s));
    }
    let f = Field::new(s)?;
    let n = s as usize + 2;
    let mut data = Vec::with_capacity((s * s * s) as usize * n);
    for a2 in 0..s {
        for a1 in 0..s {
            for a0 in 0..s {
                data.push(a2);
                data.push(a1);
                data.extend((0..s).map(|alpha| poly_eval(&f, &[a0, a1, a2], alpha)));
            }
        }
    }
    MixedLevelArray::new(vec![s; n], data)?.certify(3, budget)
}

/// Every tuple over `alphabets`, lexicographic, each repeated `lambda`
/// times in a row.
pub fn full_factorial_mixed(alphabets: &[u32], lambda: usize) -> Result<MixedLevelArray> {
    if alphabets.is_empty() || lambda == 0 {
        return Err(Error::BadParameter("full factorial needs columns and lambda >= 1".into()));
    }
    let total: usize = alphabets.iter().map(|&a| a as usize).product();
    let n = alphabets.len();
    let mut data = Vec::with_capacity(total * lambda * n);
    let mut tuple = vec![0u32; n];
    for idx in 0..total {
        let mut x = idx;
        for j in (0..n).rev() {
            tuple[j] = (x % alphabets[j] as usize) as u32;
            x /= alphabets[j] as usize;
        }
        for _ in 0..lambda {
            data.extend_from_slice(&tuple);
        }
    }
    Ok(MixedLevelArray::new(alphabets.to_vec(), data)?.with_certificate(Some(Certificate::verified(n as u32))))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AssetPayload {
    Array(MixedLevelArray),
    Scheme(DifferenceScheme),
    /// A parent array whose rows come in `blocks` consecutive equal
    /// blocks, each of strength `block_strength`.
    Partitioned { array: MixedLevelArray, blocks: usize, block_strength: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetDecl {
    pub rows: usize,
    pub cols: usize,
    pub alphabets: Vec<u32>,
    pub strength: u32,
    pub min_distance: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssetRecord {
    pub name: String,
    pub declared: AssetDecl,
    pub payload: AssetPayload,
    /// Content digest supplied by whoever loaded the payload.
    pub digest: Option<String>,
}

/// Verified literature ingredients, keyed by name. Records are checked
/// against their declarations on insert and never mutated afterwards.
#[derive(Debug, Clone, Default)]
pub struct AssetRegistry {
    records: BTreeMap<String, AssetRecord>,
}

impl AssetRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, record: AssetRecord) -> Result<()> {
        verify_record(&record).map_err(|reason| Error::AssetCorrupt { name: record.name.clone(), reason })?;
        self.records.insert(record.name.clone(), record);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Result<&AssetRecord> {
        self.records
            .get(name)
            .ok_or_else(|| Error::IngredientUnavailable(format!("asset `{name}` is not in the registry")))
    }

    pub fn array(&self, name: &str) -> Result<&MixedLevelArray> {
        match &self.get(name)?.payload {
            AssetPayload::Array(a) | AssetPayload::Partitioned { array: a, .. } => Ok(a),
            AssetPayload::Scheme(_) => Err(Error::IngredientUnavailable(format!("asset `{name}` is a scheme"))),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.records.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AssetRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

fn verify_record(rec: &AssetRecord) -> core::result::Result<(), String> {
    let d = &rec.declared;
    let check_array = |a: &MixedLevelArray| -> core::result::Result<(), String> {
        if a.rows() != d.rows || a.cols() != d.cols || a.alphabets() != d.alphabets.as_slice() {
            return Err(format!(
                "shape {}x{} {:?} differs from declared {}x{} {:?}",
                a.rows(),
                a.cols(),
                a.alphabets(),
                d.rows,
                d.cols,
                d.alphabets
            ));
        }
        a.check_strength(d.strength).map_err(|w| format!("declared strength {}: {w}", d.strength))?;
        let md = a.min_distance().unwrap_or(0);
        if md != d.min_distance {
            return Err(format!("minimal distance is {md}, declared {}", d.min_distance));
        }
        Ok(())
    };
    match &rec.payload {
        AssetPayload::Array(a) => check_array(a),
        AssetPayload::Partitioned { array, blocks, block_strength } => {
            check_array(array)?;
            if *blocks == 0 || array.rows() % blocks != 0 {
                return Err(format!("{} rows do not split into {blocks} blocks", array.rows()));
            }
            let size = array.rows() / blocks;
            for b in 0..*blocks {
                array
                    .slice_rows(b * size, (b + 1) * size)
                    .check_strength(*block_strength)
                    .map_err(|w| format!("block {b}: {w}"))?;
            }
            Ok(())
        }
        AssetPayload::Scheme(s) => {
            if s.rows() != d.rows || s.cols() != d.cols || d.alphabets != [s.group().order()] {
                return Err("scheme shape differs from declaration".to_string());
            }
            s.check(d.strength).map_err(|w| format!("columns {:?} unbalanced", w.columns))
        }
    }
}

/// Shared state for the drivers: the asset registry and the verification
/// budget.
#[derive(Debug, Clone)]
pub struct Context {
    pub assets: AssetRegistry,
    pub budget: u64,
}

impl Default for Context {
    fn default() -> Self {
        Context { assets: AssetRegistry::new(), budget: DEFAULT_BUDGET }
    }
}

impl Context {
    pub fn new(assets: AssetRegistry) -> Self {
        Context { assets, budget: DEFAULT_BUDGET }
    }
}

/// A resolved symmetric array together with a note of how it was made.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub array: MixedLevelArray,
    pub source: String,
    pub assets: Vec<String>,
}

/// Bush or hyperoval for a single prime power, truncated to `n_cols`.
fn resolve_prime_power(s: u32, n_cols: usize, t: u32, budget: u64) -> Option<(MixedLevelArray, String)> {
    prime_power(s as u64)?;
    let build = if n_cols <= s as usize + 1 && t <= s + 1 {
        bush(s, t, budget).ok().map(|a| (a, format!("bush({s},{t})")))
    } else if t == 3 && s.is_power_of_two() && n_cols <= s as usize + 2 {
        hyperoval_oa(s, budget).ok().map(|a| (a, format!("hyperoval({s})")))
    } else {
        None
    };
    let (a, name) = build?;
    Some((a.truncate_columns(n_cols).ok()?, name))
}

/// An OA(s^t, n_cols, s, t), from Bush/hyperoval, a product over the
/// prime-power factors of s, or the asset registry, in that order.
pub fn resolve_symmetric_oa(ctx: &Context, s: u32, n_cols: usize, t: u32) -> Result<Resolved> {
    if t == 0 || t as usize > n_cols || s < 2 {
        return Err(Error::BadParameter(format!("no symmetric OA with s={s}, n={n_cols}, t={t}")));
    }
    let mut why = Vec::new();
    if prime_power(s as u64).is_some() {
        if let Some((array, source)) = resolve_prime_power(s, n_cols, t, ctx.budget) {
            return Ok(Resolved { array, source, assets: Vec::new() });
        }
        why.push(format!("{s} is a prime power but Bush gives {} columns", s + 1));
    } else {
        let factors = factorize_prime_powers(s).values();
        let mut parts = Vec::new();
        let mut failed = None;
        for &u in &factors {
            match resolve_prime_power(u, n_cols, t, ctx.budget) {
                Some(p) => parts.push(p),
                None => {
                    failed = Some(u);
                    break;
                }
            }
        }
        match failed {
            None => {
                let mut iter = parts.into_iter();
                let (mut acc, mut source) = iter.next().unwrap();
                for (a, name) in iter {
                    acc = multiply_oa(&acc, &a, ctx.budget)?;
                    source = format!("{source} x {name}");
                }
                return Ok(Resolved { array: acc, source, assets: Vec::new() });
            }
            Some(u) => why.push(format!(
                "product over factors {factors:?} fails: factor {u} has no OA({u}^{t},{n_cols},{u},{t})"
            )),
        }
    }
    let rows = (s as u64).checked_pow(t).unwrap_or(u64::MAX);
    for rec in ctx.assets.iter() {
        if let AssetPayload::Array(a) = &rec.payload {
            if a.rows() as u64 == rows
                && a.cols() >= n_cols
                && a.alphabets().iter().all(|&x| x == s)
                && rec.declared.strength >= t
            {
                let array = a.clone().certify(t, u64::MAX)?.truncate_columns(n_cols)?;
                return Ok(Resolved { array, source: format!("asset {}", rec.name), assets: vec![rec.name.clone()] });
            }
        }
    }
    why.push(format!("no asset holds an OA({s}^{t},>={n_cols},{s},{t})"));
    Err(Error::IngredientUnavailable(format!(
        "OA({s}^{t},{n_cols},{s},{t}): {}",
        why.join("; ")
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bush_examples() {
        let b = bush(2, 2, DEFAULT_BUDGET).unwrap();
        let mut rows: Vec<&[u32]> = b.iter_rows().collect();
        rows.sort();
        assert_eq!(rows, [&[0, 0, 0][..], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        let b = bush(3, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!((b.rows(), b.cols(), b.min_distance()), (9, 4, Some(3)));
        let b = bush(4, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!((b.rows(), b.cols(), b.min_distance()), (64, 5, Some(3)));
        assert_eq!(bush(6, 2, 10), Err(Error::NotPrimePower(6)));
        assert_eq!(bush(2, 4, 10), Err(Error::StrengthTooHigh { s: 2, t: 4 }));
    }

    #[test]
    fn hyperoval_examples() {
        for s in [2, 4, 8] {
            let h = hyperoval_oa(s, DEFAULT_BUDGET).unwrap();
            assert_eq!(h.cols(), s as usize + 2);
            assert!(h.is_orthogonal_array(3));
        }
        assert_eq!(hyperoval_oa(3, 10), Err(Error::NotPowerOfTwo(3)));
    }

    #[test]
    fn factorials() {
        assert_eq!(full_factorial_mixed(&[2, 2], 1).unwrap().rows(), 4);
        let f = full_factorial_mixed(&[6, 2], 1).unwrap();
        assert!(f.is_orthogonal_array(2));
        let f = full_factorial_mixed(&[2], 6).unwrap();
        assert_eq!(f.rows(), 12);
        assert!(f.is_orthogonal_array(1));
    }

    #[test]
    fn resolver_routes() {
        let ctx = Context::default();
        let r = resolve_symmetric_oa(&ctx, 7, 6, 2).unwrap();
        assert!(r.source.starts_with("bush"));
        let r = resolve_symmetric_oa(&ctx, 4, 6, 3).unwrap();
        assert!(r.source.starts_with("hyperoval"));
        let r = resolve_symmetric_oa(&ctx, 20, 5, 2).unwrap();
        assert_eq!(r.array.rows(), 400);
        assert!(r.array.is_orthogonal_array(2));
        assert!(matches!(resolve_symmetric_oa(&ctx, 12, 5, 2), Err(Error::IngredientUnavailable(_))));
        assert!(matches!(resolve_symmetric_oa(&ctx, 6, 4, 2), Err(Error::IngredientUnavailable(_))));
    }
}
