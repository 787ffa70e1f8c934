//! Drivers that assemble arrays with orthogonal partitions and compile
//! them into codes. Every driver re-verifies its output with the strict
//! reduction check before returning it.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::array::{multiply_oa, MixedLevelArray};
use crate::code::{code_from_partitioned_oa, AssetRef, OaOrigin, OrthogonalPartition, Provenance, QuantumCode};
use crate::construct::{bush, full_factorial_mixed, resolve_symmetric_oa, AssetPayload, Context};
use crate::error::{Error, Result};
use crate::field::{factorize_prime_powers, prime_power};
use crate::scheme::{d3_scheme, d_2s};
use crate::verify::require_strict;

fn product(factors: &[u32]) -> u64 {
    factors.iter().map(|&f| f as u64).product()
}

fn check_factors(s: u32, factors: &[u32]) -> Result<()> {
    if s < 2 || factors.is_empty() || factors.iter().any(|&f| f < 2) || product(factors) != s as u64 {
        return Err(Error::BadFactorization(format!("{factors:?} is not a factorization of {s} into parts >= 2")));
    }
    Ok(())
}

fn asset_ref(ctx: &Context, name: &str) -> AssetRef {
    AssetRef { name: name.to_string(), digest: ctx.assets.get(name).ok().and_then(|r| r.digest.clone()) }
}

/// Rightmost column with exactly `levels` levels.
fn last_column_with(a: &MixedLevelArray, levels: u32) -> Result<usize> {
    a.alphabets()
        .iter()
        .rposition(|&x| x == levels)
        .ok_or_else(|| Error::BadParameter(format!("no {levels}-level column to replace")))
}

/// Expansive replacement of `col` by the full factorial on `factors`,
/// `lambda` copies of each tuple. A single factor equal to the column's
/// level count only relabels, so the column is left alone.
fn replace_with_factorial(a: &MixedLevelArray, col: usize, factors: &[u32], lambda: usize, budget: u64) -> Result<MixedLevelArray> {
    if factors.len() == 1 && lambda == 1 && factors[0] == a.alphabets()[col] {
        return Ok(a.clone());
    }
    let b = full_factorial_mixed(factors, lambda)?;
    a.expansive_replacement(col, &b, budget)
}

/// Adds the closed-form m next to the computed one, plus a note when the
/// code falls outside the admissible m range.
fn annotate(code: &mut QuantumCode, closed_form: Option<u128>, formula: &str) {
    let m = code.params.m;
    if let Some(c) = closed_form {
        if m != Some(c) {
            code.provenance.notes.push(format!(
                "closed form {formula} = {c}, computed m = {}",
                m.map_or_else(|| "undefined".to_string(), |m| format!("{m}"))
            ));
        }
    }
    if !code.params.m_admissible() {
        code.provenance.notes.push(format!(
            "m = {} is above the admissible upper end {}",
            m.map_or_else(|| "undefined".to_string(), |m| format!("{m}")),
            code.params.admissible_upper.map_or_else(|| "undefined".to_string(), |u| format!("{u}"))
        ));
    }
}

fn finish(code: QuantumCode) -> Result<QuantumCode> {
    require_strict(&code)?;
    Ok(code)
}

fn single_block_code(array: MixedLevelArray, prov: Provenance) -> Result<QuantumCode> {
    let partition = OrthogonalPartition::whole(&array)?;
    code_from_partitioned_oa(array, partition, prov)
}

/// ((4+n,1,3)) over (s²)¹ s³ s_1 … s_n with m = s − 1, from the strength-3
/// scheme (0, a, b, a+b) lifted by (s) and an s²-level block index.
pub fn theorem_5s2(ctx: &Context, s: u32, factors: &[u32]) -> Result<QuantumCode> {
    check_factors(s, factors)?;
    let d = d3_scheme(s)?;
    let a = d.lift().certify(3, ctx.budget)?;
    let b = a.attach_index_column(s as usize)?.certify(2, ctx.budget)?;
    let col = b.cols() - 1;
    let array = replace_with_factorial(&b, col, factors, 1, ctx.budget)?;
    let prov = Provenance {
        theorem: "t1".into(),
        ingredients: vec![format!("D3({},4,{s}) lifted by ({s})", s * s), format!("full factorial {factors:?}")],
        ..Provenance::default()
    };
    let mut code = single_block_code(array, prov)?;
    annotate(&mut code, Some(s as u128 - 1), "s - 1");
    finish(code)
}

/// OA(2s², 5, (2s)¹ s⁴, 2) with minimal distance 3 for a prime power s:
/// the block index (2s) next to D(2s,2s,s) ⊕ (s), cut down to five columns.
fn seed_prime_power(ctx: &Context, s: u32) -> Result<(MixedLevelArray, String)> {
    let (d, source) = d_2s(s, Some(&ctx.assets))?;
    let lifted = d.lift();
    let a = lifted.attach_index_column(s as usize)?;
    let drop: Vec<usize> = (5..a.cols()).collect();
    let a = if drop.is_empty() { a } else { a.delete_columns(&drop)? };
    let a = a.certify(2, ctx.budget)?;
    Ok((a, format!("D({0},{0},{s}) [{source:?}] lifted, index column, 5 columns", 2 * s)))
}

/// OA(2s², 5, (2s)¹ s⁴, 2) with minimal distance 3 for any s ≥ 2.
///
/// Composite s multiplies one seed by Bush arrays for the remaining prime
/// power factors. The seed depends on the 2- and 3-parts of s:
///
/// | case | s                          | seed                       |
/// |------|----------------------------|----------------------------|
/// | 1    | odd                        | prime-power seed for u_1   |
/// | 2a   | 2 and 3 both exactly once  | asset `oa_72_5_12_6666`    |
/// | 2b   | 2 once, 3 at least twice   | prime-power seed for 2     |
/// | 2c   | 2 at least twice, 3 once   | prime-power seed for 3     |
/// | 2d   | 2 and 3 both at least twice| prime-power seed for 2^l   |
/// | 3    | even, no factor 3          | prime-power seed for 2^l   |
pub fn theorem2_seed(ctx: &Context, s: u32) -> Result<(MixedLevelArray, Vec<String>, Vec<AssetRef>)> {
    if s < 2 {
        return Err(Error::BadParameter(format!("needs s >= 2, got {s}")));
    }
    if prime_power(s as u64).is_some() {
        let (a, src) = seed_prime_power(ctx, s)?;
        return Ok((a, vec![src], Vec::new()));
    }
    let fac = factorize_prime_powers(s);
    let f = &fac.factors;
    let (p1, p2) = (f[0].prime, f[1].prime);
    let (l1, l2) = (f[0].exponent, f[1].exponent);
    let mut ingredients = Vec::new();
    let mut assets = Vec::new();
    let (mut acc, covered): (MixedLevelArray, Vec<usize>) = if p1 == 2 && p2 == 3 && l1 == 1 && l2 == 1 {
        let name = "oa_72_5_12_6666";
        let a = ctx.assets.array(name).map_err(|_| {
            Error::IngredientUnavailable(format!(
                "s={s} has 2 and 3 each exactly once and needs the OA(72,5,12^1 6^4,2) asset {name}"
            ))
        })?;
        ingredients.push(format!("case 2a: asset {name}"));
        assets.push(asset_ref(ctx, name));
        (a.clone().certify(2, ctx.budget)?, vec![0, 1])
    } else {
        let (seed_idx, case) = match (p1, p2, l1, l2) {
            (2, 3, 1, _) => (0, "2b"),
            (2, 3, _, 1) => (1, "2c"),
            (2, 3, _, _) => (0, "2d"),
            (2, _, _, _) => (0, "3"),
            _ => (0, "1"),
        };
        let (a, src) = seed_prime_power(ctx, f[seed_idx].value)?;
        ingredients.push(format!("case {case}: {src}"));
        (a, vec![seed_idx])
    };
    for (i, pp) in f.iter().enumerate() {
        if covered.contains(&i) {
            continue;
        }
        let b = bush(pp.value, 2, ctx.budget)?.truncate_columns(5)?;
        acc = multiply_oa(&acc, &b, ctx.budget)?;
        ingredients.push(format!("times bush({},2) on 5 columns", pp.value));
    }
    Ok((acc, ingredients, assets))
}

/// ((4+n,1,3)) over (2s)¹ s³ s_1 … s_n with m = s − 1.
pub fn theorem_52s(ctx: &Context, s: u32, factors: &[u32]) -> Result<QuantumCode> {
    check_factors(s, factors)?;
    let (seed, mut ingredients, assets) = theorem2_seed(ctx, s)?;
    let col = last_column_with(&seed, s)?;
    let array = replace_with_factorial(&seed, col, factors, 1, ctx.budget)?;
    ingredients.push(format!("full factorial {factors:?}"));
    let prov = Provenance { theorem: "t2".into(), ingredients, assets, ..Provenance::default() };
    let mut code = single_block_code(array, prov)?;
    annotate(&mut code, Some(s as u128 - 1), "s - 1");
    finish(code)
}

/// ((2d+1,1,d+1)) over s^(2d-1) (s/s1)¹ s1¹ with m = s1 − 1.
pub fn theorem_s1(ctx: &Context, s: u32, d: u32, s1: u32) -> Result<QuantumCode> {
    if d == 0 || s1 < 2 {
        return Err(Error::BadParameter(format!("need d >= 1 and s1 >= 2, got d={d}, s1={s1}")));
    }
    if s % s1 != 0 {
        return Err(Error::DivisibilityViolated { product: s1 as u64, s });
    }
    if (s as u64) < (s1 as u64) * (s1 as u64) {
        return Err(Error::SBoundViolated { s, s1 });
    }
    let base = resolve_symmetric_oa(ctx, s, 2 * d as usize, d)?;
    let col = base.array.cols() - 1;
    let array = replace_with_factorial(&base.array, col, &[s / s1, s1], 1, ctx.budget)?;
    let prov = Provenance {
        theorem: "t3".into(),
        ingredients: vec![base.source.clone(), format!("full factorial [{}, {s1}]", s / s1)],
        assets: base.assets.iter().map(|n| asset_ref(ctx, n)).collect(),
        ..Provenance::default()
    };
    let mut code = single_block_code(array, prov)?;
    annotate(&mut code, Some(s1 as u128 - 1), "s1 - 1");
    finish(code)
}

/// The two codes of the dimension-raising construction. `second` is
/// present when q-factors were given.
#[derive(Debug, Clone)]
pub struct TnCodes {
    pub first: QuantumCode,
    pub second: Option<QuantumCode>,
}

/// Codes with K = s^l built from an OA(s^(d+l), 2d+2l+1, s, d+l): rows are
/// grouped by their first l entries, the prefix is dropped, and one
/// s-level column becomes the full factorial on `s_factors` with index
/// s/∏s_factors. With `q_factors` a second s-level column is split too.
pub fn theorem_tn(ctx: &Context, s: u32, d: u32, l: u32, s_factors: &[u32], q_factors: Option<&[u32]>) -> Result<TnCodes> {
    if d == 0 || s_factors.is_empty() || s_factors.iter().any(|&f| f < 2) {
        return Err(Error::BadParameter(format!("need d >= 1 and factors >= 2, got d={d}, {s_factors:?}")));
    }
    let prod_s = product(s_factors);
    if s as u64 % prod_s != 0 {
        return Err(Error::DivisibilityViolated { product: prod_s, s });
    }
    if let Some(q) = q_factors {
        check_factors(s, q)?;
    }
    let n = (2 * d + 2 * l + 1) as usize;
    let base = resolve_symmetric_oa(ctx, s, n, d + l)?;
    let (stripped, partition) = crate::code::partition_by_prefix(&base.array, l as usize, ctx.budget)?;
    let blocks = partition.blocks;
    let lambda = (s as u64 / prod_s) as usize;
    let col1 = stripped.cols() - 1;
    let b = replace_with_factorial(&stripped, col1, s_factors, lambda, ctx.budget)?;
    let assets: Vec<AssetRef> = base.assets.iter().map(|n| asset_ref(ctx, n)).collect();
    let mut ingredients = vec![
        base.source.clone(),
        format!("rows grouped by the first {l} columns into {blocks} blocks"),
        format!("full factorial {s_factors:?} with index {lambda}"),
    ];
    let sl = (s as u128).pow(l);
    let closed_first = (prod_s as u128 - 1) * sl;
    let tag = if l >= 1 { "t4(i)" } else { "t4(ii)" };
    let part_b = OrthogonalPartition::certify(&b, blocks, d, ctx.budget)?;
    let prov = Provenance { theorem: tag.into(), ingredients: ingredients.clone(), assets: assets.clone(), ..Provenance::default() };
    let mut first = code_from_partitioned_oa(b.clone(), part_b, prov)?;
    annotate(&mut first, Some(closed_first), "(prod s_i - 1) s^l");
    let first = finish(first)?;

    let second = match q_factors {
        None => None,
        Some(q) => {
            // Column col1 - 1 is still an s-level column of the stripped array.
            let col2 = col1 - 1;
            let c = replace_with_factorial(&b, col2, q, 1, ctx.budget)?;
            ingredients.push(format!("full factorial {q:?}"));
            let part_c = OrthogonalPartition::certify(&c, blocks, d, ctx.budget)?;
            let prov = Provenance { theorem: tag.into(), ingredients, assets, ..Provenance::default() };
            let mut code = code_from_partitioned_oa(c, part_c, prov)?;
            if l >= 1 {
                annotate(&mut code, Some(closed_first), "(prod s_i - 1) s^l");
            } else {
                let w = s_factors.iter().chain(q.iter()).copied().max().unwrap() as u128;
                let num = s as u128 * prod_s as u128;
                let closed = (num % w == 0).then(|| num / w - 1);
                annotate(&mut code, closed, "s prod s_i / w - 1");
            }
            Some(finish(code)?)
        }
    };
    Ok(TnCodes { first, second })
}

/// ((4+n,1,3)) over s⁴ s_1 … s_n from an OA(s², 5, s, 2).
pub fn corollary_5lie(ctx: &Context, s: u32, factors: &[u32]) -> Result<QuantumCode> {
    if s == 6 || s == 10 {
        return Err(Error::ExcludedS(s));
    }
    if s < 4 {
        return Err(Error::BadParameter(format!("needs s >= 4, got {s}")));
    }
    let mut code = theorem_tn(ctx, s, 2, 0, factors, None)?.first;
    code.provenance.theorem = "c3".into();
    Ok(code)
}

/// Splits the s1-level column `col` of a code built from a partitioned OA
/// into columns with `q_factors` levels, in every block at once.
pub fn theorem_huan(ctx: &Context, code: &QuantumCode, col: usize, q_factors: &[u32]) -> Result<QuantumCode> {
    let origin = code.provenance.origin.ok_or(Error::NotFromOA)?;
    let alph = code.kets().alphabets();
    if col >= alph.len() {
        return Err(Error::ColumnOutOfRange { col, cols: alph.len() });
    }
    let s1 = alph[col];
    check_factors(s1, q_factors)?;
    let parent = code.kets().clone().certify(origin.strength, ctx.budget)?;
    let array = replace_with_factorial(&parent, col, q_factors, 1, ctx.budget)?;
    let partition = OrthogonalPartition::certify(&array, code.blocks(), origin.partition_strength, ctx.budget)?;
    let mut prov = code.provenance.clone();
    prov.theorem = format!("t5 <- {}", code.provenance.theorem);
    prov.ingredients.push(format!("column {col} split as {q_factors:?}"));
    prov.notes.clear();
    let mut out = code_from_partitioned_oa(array, partition, prov)?;

    // Closed form s2^n (s1/w - 1) for inputs shaped s1^(2d) s2^n.
    let others: Vec<u32> = alph.iter().copied().filter(|&x| x != s1).collect();
    let closed = match others.first() {
        Some(&s2) if others.iter().all(|&x| x == s2) && s1 > s2 => {
            let w = q_factors.iter().copied().chain([s2]).max().unwrap() as u128;
            (s1 as u128 % w == 0).then(|| (s2 as u128).pow(others.len() as u32) * (s1 as u128 / w - 1))
        }
        _ => None,
    };
    annotate(&mut out, closed, "s2^n (s1/w - 1)");
    finish(out)
}

/// A code stored as a partitioned array in the asset registry.
pub fn code_from_asset(ctx: &Context, name: &str) -> Result<QuantumCode> {
    let rec = ctx.assets.get(name)?;
    match &rec.payload {
        AssetPayload::Partitioned { array, blocks, block_strength } => {
            let array = array.clone().certify(rec.declared.strength, ctx.budget)?;
            let partition = OrthogonalPartition::certify(&array, *blocks, *block_strength, ctx.budget)?;
            let prov = Provenance {
                theorem: format!("asset {name}"),
                assets: vec![asset_ref(ctx, name)],
                origin: Some(OaOrigin {
                    strength: rec.declared.strength,
                    partition_strength: *block_strength,
                    min_distance: rec.declared.min_distance,
                }),
                ..Provenance::default()
            };
            finish(code_from_partitioned_oa(array, partition, prov)?)
        }
        _ => Err(Error::IngredientUnavailable(format!("asset {name} is not a partitioned array"))),
    }
}
