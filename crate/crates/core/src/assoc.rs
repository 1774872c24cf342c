//! Associated groups and second quandle homology of the classes of
//! PSL(2,q), through the Schur covering group.
//!
//! For a generating class `X` of a perfect group `G` with Schur cover
//! `Ĝ -> G`, pick `x` in `X` and a lift `ŷ`. The central elements `z` of
//! the kernel with `zŷ` conjugate to `ŷ` form the image of `μ_x`; the
//! relative multiplier is the kernel modulo that image. Then
//! `Ass X = D_X × Z` with `D_X = Ĝ/μ`, and `H_2(X)` is the abelianization
//! of the centralizer of the image of `ŷ` in `D_X`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::AbelianInvariants;
use crate::conjugacy::{class_info, class_members, tabulated_psl, tabulated_sl, ClassDescriptor, ClassType};
use crate::field::{field_of_order, Field};
use crate::finite::{FiniteGroup, GroupError, MAX_TABLE_ORDER};
use crate::fpgroup::{parse_presentation, FpError, RegularGroup, A6_COVER_ROBERTSON, DEFAULT_COSET_LIMIT};
use crate::matrix::MatrixError;

/// Number of random basepoints used to check independence of the choice.
pub const BASEPOINT_SAMPLES: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AssocError {
    #[error("q = {q} is not supported: the class must generate a perfect group (q > 3)")]
    UnsupportedQ { q: u32 },
    #[error("the identity class does not generate PSL(2,q)")]
    IdentityClass,
    #[error("covering group of order {order} exceeds the table bound {bound}")]
    BoundExceeded { order: u64, bound: usize },
    #[error("no isomorphism found onto PSL(2,{q})")]
    NoIsomorphism { q: u32 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Fp(#[from] FpError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverLabel {
    /// SL(2,q) over the same field.
    Sl2,
    /// SL(2,5), through PSL(2,4) = PSL(2,5).
    Sl2Of5,
    /// The 2160-element cover of A6 = PSL(2,9).
    A6Star,
}

impl std::fmt::Display for CoverLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CoverLabel::Sl2 => "SL(2,q)",
            CoverLabel::Sl2Of5 => "SL(2,5)@q=4",
            CoverLabel::A6Star => "A6star@q=9",
        })
    }
}

/// A Schur cover of PSL(2,q) as a table group with its projection.
#[derive(Debug)]
pub struct SchurCover {
    pub label: CoverLabel,
    pub group: FiniteGroup,
    /// Kernel of the projection, which is the Schur multiplier; sorted.
    pub kernel: Vec<usize>,
    /// Cover element -> index in the tabulated PSL(2,q).
    pub proj: Vec<usize>,
}

impl SchurCover {
    pub fn multiplier_order(&self) -> usize {
        self.kernel.len()
    }

    /// Cover elements over the PSL element `x`.
    pub fn lifts(&self, x: usize) -> Vec<usize> {
        (0..self.group.order()).filter(|&c| self.proj[c] == x).collect()
    }
}

fn check_q(field: &Field) -> Result<(), AssocError> {
    if field.q() <= 3 {
        return Err(AssocError::UnsupportedQ { q: field.q() });
    }
    let q = field.q() as u64;
    let order = if field.q() == 9 { 2160 } else { q * q * q - q };
    if order > MAX_TABLE_ORDER as u64 {
        return Err(AssocError::BoundExceeded { order, bound: MAX_TABLE_ORDER });
    }
    Ok(())
}

/// The Schur cover used for `q`, memoized per field.
pub fn schur_cover(field: &Field) -> Result<Arc<SchurCover>, AssocError> {
    check_q(field)?;
    type Cache = Mutex<HashMap<(u32, u32), Arc<SchurCover>>>;
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (field.p(), field.n());
    if let Some(c) = cache.lock().unwrap().get(&key) {
        return Ok(c.clone());
    }
    let cover = Arc::new(match field.q() {
        4 => sl2_of_5_cover(field)?,
        9 => a6_star_cover(field)?,
        _ => sl2_cover(field, CoverLabel::Sl2)?,
    });
    cache.lock().unwrap().insert(key, cover.clone());
    Ok(cover)
}

fn sl2_cover(over: &Field, label: CoverLabel) -> Result<SchurCover, AssocError> {
    let sl = tabulated_sl(over)?;
    let psl = tabulated_psl(over)?;
    let proj: Vec<usize> = sl.elements().iter().map(|m| psl.index_of(m).expect("projective image")).collect();
    let id = psl.table().identity();
    let kernel = (0..proj.len()).filter(|&c| proj[c] == id).collect();
    Ok(SchurCover { label, group: sl.table().clone(), kernel, proj })
}

fn sl2_of_5_cover(field: &Field) -> Result<SchurCover, AssocError> {
    let f5 = field_of_order(5).expect("GF(5)");
    let mut cover = sl2_cover(&f5, CoverLabel::Sl2Of5)?;
    let iso = isomorphism_into_psl(field, tabulated_psl(&f5)?.table())?;
    // iso: PSL(2,5) index -> PSL(2,4) index
    for c in cover.proj.iter_mut() {
        *c = iso[*c];
    }
    Ok(cover)
}

fn a6_star_cover(field: &Field) -> Result<SchurCover, AssocError> {
    let p = parse_presentation(A6_COVER_ROBERTSON).map_err(FpError::from)?;
    let g = RegularGroup::realize(&p, DEFAULT_COSET_LIMIT)?;
    let table = g.to_finite_group()?;
    let centre = table.center();
    let (quotient, to_quotient) = table.quotient(&centre)?;
    let iso = isomorphism_into_psl(field, &quotient)?;
    let proj = to_quotient.iter().map(|&c| iso[c]).collect();
    Ok(SchurCover { label: CoverLabel::A6Star, group: table, kernel: centre, proj })
}

/// An isomorphism from `source` onto the tabulated PSL(2,q).
fn isomorphism_into_psl(field: &Field, source: &FiniteGroup) -> Result<Vec<usize>, AssocError> {
    let psl = tabulated_psl(field)?;
    source.find_isomorphism(psl.table()).ok_or(AssocError::NoIsomorphism { q: field.q() })
}

fn class_indices(field: &Field, cd: &ClassDescriptor) -> Result<Vec<usize>, AssocError> {
    if cd.class_type() == ClassType::Identity {
        return Err(AssocError::IdentityClass);
    }
    Ok(class_members(&*tabulated_psl(field)?, cd))
}

/// Kernel elements `z` with `z ŷ` conjugate to `ŷ`, for a lift `ŷ` of the
/// PSL element `x`.
pub fn mu_image_at(cover: &SchurCover, x: usize) -> Vec<usize> {
    let g = &cover.group;
    let lift = cover.lifts(x)[0];
    let class = g.bitset(&g.conjugation_orbit(lift, &g.generators()));
    cover.kernel.iter().copied().filter(|&z| class.contains(g.mul(z, lift))).collect()
}

/// Order of the image of `μ_x`, computed at the class representative.
pub fn mu_image_order(field: &Field, cd: &ClassDescriptor) -> Result<usize, AssocError> {
    let members = class_indices(field, cd)?;
    let cover = schur_cover(field)?;
    Ok(mu_image_at(&cover, members[0]).len())
}

/// `μ` orders at `samples` random members of the class.
pub fn mu_image_orders_at_random_points(
    field: &Field,
    cd: &ClassDescriptor,
    samples: usize,
    seed: u64,
) -> Result<Vec<usize>, AssocError> {
    let members = class_indices(field, cd)?;
    let cover = schur_cover(field)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..samples).map(|_| mu_image_at(&cover, *members.choose(&mut rng).unwrap()).len()).collect())
}

/// The relative Schur multiplier from the lift-conjugacy computation. The
/// multiplier is cyclic here, so the quotient is cyclic of order
/// `|M| / |μ|`.
pub fn relative_schur_multiplier(field: &Field, cd: &ClassDescriptor) -> Result<AbelianInvariants, AssocError> {
    let mu = mu_image_order(field, cd)?;
    let cover = schur_cover(field)?;
    Ok(AbelianInvariants::cyclic((cover.multiplier_order() / mu) as u64))
}

/// The relative multiplier from the closed-form case table.
pub fn symbolic_relative_multiplier(field: &Field, cd: &ClassDescriptor) -> Result<AbelianInvariants, AssocError> {
    check_q(field)?;
    let info = class_info(field, cd);
    if info.class_type == ClassType::Identity {
        return Err(AssocError::IdentityClass);
    }
    let q = field.q();
    Ok(match q {
        9 => match info.order {
            3 => AbelianInvariants::cyclic(2),
            2 => AbelianInvariants::cyclic(3),
            _ => AbelianInvariants::cyclic(6),
        },
        // PSL(2,4) = PSL(2,5): the odd-q rule through the isomorphism
        4 if info.order == 2 => AbelianInvariants::trivial(),
        4 => AbelianInvariants::cyclic(2),
        _ if q.is_multiple_of(2) => AbelianInvariants::trivial(),
        _ if info.order == 2 => AbelianInvariants::trivial(),
        _ => AbelianInvariants::cyclic(2),
    })
}

/// `D_X = Ĝ / μ` as a table group, with the image of a lift of `x`.
pub fn dx_group(field: &Field, cd: &ClassDescriptor) -> Result<(FiniteGroup, usize), AssocError> {
    let members = class_indices(field, cd)?;
    let cover = schur_cover(field)?;
    let mu = mu_image_at(&cover, members[0]);
    let (dx, proj) = cover.group.quotient(&mu)?;
    let lift = cover.lifts(members[0])[0];
    Ok((dx, proj[lift]))
}

/// Abelianization of the centralizer of the lift of `x` in `D_X`.
pub fn h2_quandle(field: &Field, cd: &ClassDescriptor) -> Result<AbelianInvariants, AssocError> {
    let (dx, gx) = dx_group(field, cd)?;
    let c = dx.centralizer(gx);
    let (cg, _) = dx.induced(&c)?;
    let derived = cg.derived_subgroup(&cg.all());
    let (ab, _) = cg.quotient(&derived)?;
    Ok(AbelianInvariants::from_order_counts(&ab.order_counts(&ab.all())))
}

#[derive(Clone, Debug, Serialize)]
pub struct AssDescriptor {
    pub class_id: String,
    pub q: u32,
    pub covering_label: CoverLabel,
    pub cover_order: usize,
    pub multiplier_order: usize,
    pub mu_image_order: usize,
    pub rel_multiplier: AbelianInvariants,
    pub symbolic_rel_multiplier: AbelianInvariants,
    /// `n(X)`: the order of the central subgroup divided out of the cover.
    pub central_quotient_order: usize,
    pub dx_identification: String,
    pub dx_order: usize,
    pub ass_identification: String,
    pub h2_invariants: AbelianInvariants,
    /// `H_2` outside the range of the closed-form description (q = 4, 9).
    pub h2_extension: bool,
    pub basepoints_checked: usize,
    pub basepoint_independent: bool,
}

pub fn ass_descriptor(field: &Field, cd: &ClassDescriptor) -> Result<AssDescriptor, AssocError> {
    let cover = schur_cover(field)?;
    let q = field.q();
    let mu = mu_image_order(field, cd)?;
    let rel = relative_schur_multiplier(field, cd)?;
    let (dx, _) = dx_group(field, cd)?;
    let dx_identification = match (cover.label, mu) {
        (CoverLabel::A6Star, 1) => "A6*".to_string(),
        (CoverLabel::A6Star, n) => format!("A6* / (central subgroup of order {n})"),
        (CoverLabel::Sl2Of5, 1) => "SL(2,5)".into(),
        (CoverLabel::Sl2Of5, _) => "PSL(2,5) = PSL(2,4)".into(),
        (_, m) if m == cover.multiplier_order() => format!("PSL(2,{q})"),
        _ => format!("SL(2,{q})"),
    };
    let samples = mu_image_orders_at_random_points(field, cd, BASEPOINT_SAMPLES, 0x5eed)?;
    Ok(AssDescriptor {
        class_id: cd.id(),
        q,
        covering_label: cover.label,
        cover_order: cover.group.order(),
        multiplier_order: cover.multiplier_order(),
        mu_image_order: mu,
        symbolic_rel_multiplier: symbolic_relative_multiplier(field, cd)?,
        central_quotient_order: mu,
        ass_identification: format!("{dx_identification} x Z"),
        dx_identification,
        dx_order: dx.order(),
        h2_invariants: h2_quandle(field, cd)?,
        h2_extension: q == 4 || q == 9,
        basepoints_checked: samples.len(),
        basepoint_independent: samples.iter().all(|&m| m == mu),
        rel_multiplier: rel,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DihedralCheck {
    pub q: u32,
    pub centralizer_order: usize,
    pub is_dihedral: bool,
    /// `q - 1` or `q + 1`.
    pub matches_q_pm_1: bool,
}

/// The centralizer of an involution of PSL(2,q), q odd, tested for being
/// dihedral: a cyclic subgroup of index two plus an involution outside it
/// inverting its generator.
pub fn involution_centralizer_check(field: &Field) -> Result<DihedralCheck, AssocError> {
    let q = field.q();
    if q.is_multiple_of(2) {
        return Err(AssocError::UnsupportedQ { q });
    }
    let t = tabulated_psl(field)?;
    let g = t.table();
    let x = (0..g.order()).find(|&i| g.element_order(i) == 2).expect("an involution");
    let c = g.centralizer(x);
    let n = c.len();
    let is_dihedral = n % 2 == 0
        && c.iter().any(|&r| {
            g.element_order(r) == n / 2 && {
                let rot = g.closure(&[r]);
                c.iter().any(|&s| rot.binary_search(&s).is_err() && g.element_order(s) == 2 && g.conj(s, r) == g.inv(r))
            }
        });
    let q = q as usize;
    Ok(DihedralCheck { q: field.q(), centralizer_order: n, is_dihedral, matches_q_pm_1: n == q - 1 || n == q + 1 })
}
