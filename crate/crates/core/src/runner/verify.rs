use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::array_model::{
    build_region_matrices, region_matrix_cos_weighted, AngularRegion, ArrayConfig,
};
use crate::error::Result;
use crate::numerics::{herm_eig, CMatrix, C64};
use crate::oracles::{
    lemma2_check, lemma3_check, random_lemma3_instance, random_partition, random_psd,
    random_ratio_upper_bound, OracleResult,
};
use crate::rayleigh::solve_min_ratio;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub oracle: Option<OracleResult>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyManifest {
    pub schema: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<VerifyCheck>,
}

fn from_oracle(name: String, r: Result<OracleResult>) -> VerifyCheck {
    match r {
        Ok(o) => VerifyCheck {
            name,
            passed: o.passed,
            detail: format!(
                "lhs {:.12e}, rhs {:.12e}, rel diff {:.3e}",
                o.lhs, o.rhs, o.rel_diff
            ),
            oracle: Some(o),
        },
        Err(e) => VerifyCheck {
            name,
            passed: false,
            oracle: None,
            detail: format!("error: {e}"),
        },
    }
}

fn bound_check(name: String, value: f64, bound: f64, detail: String) -> VerifyCheck {
    VerifyCheck {
        name,
        passed: value >= bound,
        oracle: None,
        detail: format!("{detail}: {value:.12e} (bound {bound:.12e})"),
    }
}

/// Desk-scale oracle suite; every check is deterministic given `seed`.
pub fn run_verify(seed: u64) -> VerifyManifest {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for m in [1, 4, 8, 16] {
        let name = format!("quadrature/cos_weighted_identity_m{m}");
        let check = region_matrix_cos_weighted(&AngularRegion::full(), m, 4).map(|a| {
            (a.as_matrix() - CMatrix::identity(m, m) * C64::new(2.0, 0.0))
                .iter()
                .fold(0.0_f64, |acc, z| acc.max(z.norm()))
        });
        checks.push(match check {
            Ok(err) => bound_check(name, -err, -1e-10, "negated max entry error".into()),
            Err(e) => VerifyCheck {
                name,
                passed: false,
                oracle: None,
                detail: format!("error: {e}"),
            },
        });
    }

    for k in 0..10 {
        let (cfg, ml) = random_partition(&mut rng, 12, 3);
        let name = format!("lemma1/partition_{k}_m{}_q{}", cfg.m, cfg.q);
        let lmin = build_region_matrices(cfg, &ml, &ml.complement(), 4)
            .and_then(|rm| herm_eig(&(&rm.a_ml + &rm.a_sl)))
            .map(|e| e.min_eigenvalue());
        checks.push(match lmin {
            Ok(l) => bound_check(
                name,
                l,
                2.0 * (1.0 - 1e-8),
                "min eigenvalue of A_ml + A_sl".into(),
            ),
            Err(e) => VerifyCheck {
                name,
                passed: false,
                oracle: None,
                detail: format!("error: {e}"),
            },
        });
    }

    let region = ArrayConfig::new(6, 1, 1.0).and_then(|cfg| {
        let ml = AngularRegion::from_lobes_deg(&[(0.0, 22.0)])?;
        build_region_matrices(cfg, &ml, &ml.complement(), 4)
    });
    checks.push(from_oracle(
        "lemma2/region_m6_q1_22deg".into(),
        region.and_then(|rm| lemma2_check(&rm.a_sl, &rm.a_ml, 1e-5)),
    ));
    for k in 0..4 {
        let n = 3 + k;
        let a = random_psd(n, 1 + k % 3, &mut rng);
        let b = random_psd(n, n, &mut rng);
        checks.push(from_oracle(
            format!("lemma2/random_{k}_n{n}"),
            lemma2_check(&b, &a, 1e-5),
        ));

        let closed = solve_min_ratio(&b, &a).map(|s| s.value);
        let sampled = random_ratio_upper_bound(&b, &a, 2000, seed.wrapping_add(k as u64));
        let name = format!("sampling_bound/random_{k}_n{n}");
        checks.push(match (closed, sampled) {
            (Ok(c), Ok(s)) => bound_check(name, s, c - 1e-9, "sampled minimum".into()),
            (Err(e), _) | (_, Err(e)) => VerifyCheck {
                name,
                passed: false,
                oracle: None,
                detail: format!("error: {e}"),
            },
        });
    }

    for k in 0..5 {
        let (cons, b, q) = random_lemma3_instance(&mut rng);
        let name = format!("lemma3/random_{k}_m{}_k{}_q{q}", b.dim(), cons.len());
        checks.push(from_oracle(name, lemma3_check(&cons, &b, q, 1e-5)));
    }

    VerifyManifest {
        schema: super::SCHEMA,
        seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}
