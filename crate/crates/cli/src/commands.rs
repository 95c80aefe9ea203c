// Copyright 2026 cpmod Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;
use std::path::Path;

use cpmod::compare::{
    self, commutant, connecting_partial_isometry, equivalent, is_dominated, is_pure, reconstruct_stinespring,
    rn_derivative, scalar_derivative, DominationMode,
};
use cpmod::cpmaps::{is_nondegenerate_map, validate_module_cp};
use cpmod::dilation::{construct, quintuples_unitarily_equivalent};
use cpmod::numerics::{max_abs_diff, op_norm, projector_onto_span, unitarity_defect};
use cpmod::oracle::{verify_equivalence_pointwise, verify_factorization, SampleConfig};
use cpmod::{CommutantElement, ModuleMap, Quintuple, Tolerance};

use crate::problem::{basis_key, ElementFile, ProblemFile};
use crate::report::{CommandEcho, Report};
use crate::{Cli, CliError, Command, Mode, Outcome};

struct Ctx {
    tol: Tolerance,
    cfg: SampleConfig,
    verify: bool,
}

pub(crate) fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let tol = match cli.tol {
        Some(t) => Tolerance::from_eq_abs_tol(t)?,
        None => Tolerance::default(),
    };
    let ctx = Ctx {
        tol,
        cfg: SampleConfig::new(cli.seed, cli.samples, 1.0)?,
        verify: cli.verify,
    };
    match &cli.command {
        Command::Validate { file, map } => validate(&ctx, file, map),
        Command::Stinespring { file, map } => stinespring(&ctx, file, map),
        Command::Compare { file, a, b } => compare_maps(&ctx, file, a, b),
        Command::Dominates { file, a, b, mode } => dominates(&ctx, file, a, b, *mode),
        Command::Rn { file, a, b } => rn(&ctx, file, a, b),
        Command::Compress { file, map, element } => compress(&ctx, file, map, element),
        Command::Commutant { file, map } => commutant_basis(&ctx, file, map),
        Command::Purity { file, map } => purity(&ctx, file, map),
        Command::Reconstruct { file, a, b } => reconstruct(&ctx, file, a, b),
    }
}

fn report(ctx: &Ctx, name: &str, file: &Path, maps: &[&str], options: &[(&str, String)]) -> Report {
    let mut options: BTreeMap<String, String> = options.iter().map(|(k, v)| ((*k).into(), v.clone())).collect();
    if ctx.verify {
        options.insert("verify".into(), "true".into());
        options.insert("seed".into(), ctx.cfg.seed().to_string());
        options.insert("samples".into(), ctx.cfg.samples().to_string());
    }
    let echo = CommandEcho {
        name: name.into(),
        file: file.display().to_string(),
        maps: maps.iter().map(|m| (*m).to_string()).collect(),
        options,
    };
    Report::new(echo, &ctx.tol)
}

/// Loads a map and requires it to be a module CP map.
fn valid_map(ctx: &Ctx, problem: &ProblemFile, name: &str) -> Result<ModuleMap, CliError> {
    let map = problem.map(name)?;
    let check = validate_module_cp(&map, &ctx.tol);
    if !check.is_valid {
        return Err(CliError::Input(format!(
            "map {name:?} is not a module CP map (consistency residual {:e})",
            check.residual
        )));
    }
    Ok(map)
}

fn unit_key(m: usize, s: usize, t: usize) -> String {
    if m > 9 {
        format!("E_{}_{}", s + 1, t + 1)
    } else {
        format!("E_{}{}", s + 1, t + 1)
    }
}

fn shape(r: &mut Report, map: &ModuleMap) {
    r.dimension("k", map.module().k())
        .dimension("m", map.module().m())
        .dimension("H", map.p())
        .dimension("K", map.q());
}

fn quintuple_matrices(r: &mut Report, q: &Quintuple) {
    r.dimension("H_dilation", q.d_h()).dimension("K_dilation", q.d_k());
    r.matrix("V", q.v()).matrix("W", q.w());
    let m = q.module().m();
    for s in 0..m {
        for t in 0..m {
            r.matrix(format!("pi_A({})", unit_key(m, s, t)), q.pi_phi().pi(s, t));
        }
    }
    let module = q.module();
    for i in 0..module.dim() {
        let (a, b) = module.basis_pair(i);
        r.matrix(format!("pi_X({})", basis_key(&module, a, b)), &q.pi_x_images()[i]);
    }
}

fn validate(ctx: &Ctx, file: &Path, name: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let map = problem.map(name)?;
    let check = validate_module_cp(&map, &ctx.tol);
    let mut r = report(ctx, "validate", file, &[name], &[]);
    shape(&mut r, &map);
    r.verdict("valid", check.is_valid)
        .verdict("nondegenerate", is_nondegenerate_map(&map, &ctx.tol))
        .residual("consistency", check.residual)
        .value("choi_min_eigenvalue", check.choi_min_eigenvalue);
    let m = map.module().m();
    for s in 0..m {
        for t in 0..m {
            r.matrix(format!("phi({})", unit_key(m, s, t)), check.phi.image(s, t));
        }
    }
    if ctx.verify && check.is_valid {
        let q = construct(&map, &ctx.tol)?;
        r.verified("factorization", verify_factorization(&q, &map, &ctx.cfg));
    }
    Ok(Outcome {
        positive: check.is_valid,
        report: r,
    })
}

fn stinespring(ctx: &Ctx, file: &Path, name: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let map = valid_map(ctx, &problem, name)?;
    let q = construct(&map, &ctx.tol)?;
    let inv = q.invariants(&map, &ctx.tol);
    let mut r = report(ctx, "stinespring", file, &[name], &[]);
    shape(&mut r, &map);
    r.verdict("invariants_hold", inv.all_hold(&ctx.tol))
        .verdict("minimal_H", inv.minimal_h)
        .verdict("minimal_K", inv.minimal_k)
        .verdict("nondegenerate_representation", inv.nondegenerate)
        .residual("representation", inv.representation)
        .residual("homomorphism", inv.homomorphism)
        .residual("coisometry", inv.coisometry)
        .residual("factorization", inv.factorization);
    quintuple_matrices(&mut r, &q);
    if ctx.verify {
        r.verified("factorization", verify_factorization(&q, &map, &ctx.cfg));
    }
    Ok(Outcome {
        positive: inv.all_hold(&ctx.tol),
        report: r,
    })
}

fn compare_maps(ctx: &Ctx, file: &Path, a: &str, b: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let (phi, psi) = (valid_map(ctx, &problem, a)?, valid_map(ctx, &problem, b)?);
    let tol = &ctx.tol;
    let eq = equivalent(&phi, &psi, tol)?;
    let (phi_small, psi_small) = (validate_module_cp(&phi, tol).phi, validate_module_cp(&psi, tol).phi);
    let mut r = report(ctx, "compare", file, &[a, b], &[]);
    shape(&mut r, &phi);
    let (nd_a, nd_b) = (is_nondegenerate_map(&phi, tol), is_nondegenerate_map(&psi, tol));
    r.verdict("equivalent", eq)
        .verdict(&format!("{a}_nondegenerate"), nd_a)
        .verdict(&format!("{b}_nondegenerate"), nd_b)
        .residual("underlying_deviation", phi_small.max_deviation(&psi_small)?);
    if eq {
        let v = connecting_partial_isometry(&phi, &psi, tol)?;
        let intertwining = phi
            .images()
            .iter()
            .zip(psi.images())
            .fold(0.0f64, |acc, (x, y)| acc.max(max_abs_diff(&(&v * y), x)));
        let p_phi = projector_onto_span(&phi.spanning_columns(), tol);
        let p_psi = projector_onto_span(&psi.spanning_columns(), tol);
        r.residual("V_intertwining", intertwining)
            .residual("VV*_range_projector", max_abs_diff(&(&v * v.adjoint()), &p_phi))
            .residual("V*V_range_projector", max_abs_diff(&(v.adjoint() * &v), &p_psi));
        if nd_a && nd_b {
            r.verdict("V_unitary", unitarity_defect(&v) <= tol.eq_abs_tol);
        }
        r.matrix("V", &v);
    }
    let (qa, qb) = (construct(&phi, tol)?, construct(&psi, tol)?);
    let (same, witness) = quintuples_unitarily_equivalent(&qa, &qb, tol)?;
    r.verdict("quintuples_equivalent", same)
        .dimension(&format!("{a}_H_dilation"), qa.d_h())
        .dimension(&format!("{a}_K_dilation"), qa.d_k())
        .dimension(&format!("{b}_H_dilation"), qb.d_h())
        .dimension(&format!("{b}_K_dilation"), qb.d_k())
        .residual("quintuple_equivalence", witness.max_residual)
        .value("W_offset", witness.w_residual);
    if same {
        r.matrix("U1", &witness.u1)
            .matrix("U2", &witness.u2)
            .matrix("W_connecting", &witness.connecting);
    }
    if ctx.verify {
        r.verified(
            "pointwise_equivalence",
            verify_equivalence_pointwise(&phi, &psi, &ctx.cfg)?,
        );
    }
    Ok(Outcome {
        positive: eq,
        report: r,
    })
}

fn dominates(ctx: &Ctx, file: &Path, a: &str, b: &str, mode: Mode) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let (psi, phi) = (valid_map(ctx, &problem, a)?, valid_map(ctx, &problem, b)?);
    let (lib_mode, mut options) = match mode {
        Mode::Complete => (DominationMode::Complete, vec![("mode", "complete".to_string())]),
        Mode::Pointwise => (
            DominationMode::PointwiseSampled(ctx.cfg),
            vec![
                ("mode", "pointwise".to_string()),
                ("seed", ctx.cfg.seed().to_string()),
                ("samples", ctx.cfg.samples().to_string()),
            ],
        ),
    };
    options.sort();
    let verdict = is_dominated(&psi, &phi, lib_mode, &ctx.tol)?;
    let mut r = report(ctx, "dominates", file, &[a, b], &options);
    shape(&mut r, &phi);
    r.verdict("dominated", verdict.dominated)
        .value("margin", verdict.margin);
    if ctx.verify {
        let sampled = is_dominated(&psi, &phi, DominationMode::PointwiseSampled(ctx.cfg), &ctx.tol)?;
        r.verified("pointwise_margin", sampled.margin);
    }
    Ok(Outcome {
        positive: verdict.dominated,
        report: r,
    })
}

fn rn(ctx: &Ctx, file: &Path, a: &str, b: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let (psi, phi) = (valid_map(ctx, &problem, a)?, valid_map(ctx, &problem, b)?);
    let d = rn_derivative(&psi, &phi, &ctx.tol)?;
    let mut r = report(ctx, "rn", file, &[a, b], &[]);
    shape(&mut r, &phi);
    r.residual("J", d.j_residual)
        .residual("I", d.imap_residual)
        .value("norm_J", op_norm(&d.j))
        .value("norm_I", op_norm(&d.imap));
    let scalar = scalar_derivative(&d, &ctx.tol);
    r.verdict("scalar", scalar.is_some());
    if let Some(c) = scalar {
        r.value("scalar_value", c);
    }
    r.matrix("J", &d.j)
        .matrix("I", &d.imap)
        .matrix("Delta1", &d.delta1)
        .matrix("Delta2", &d.delta2);
    if ctx.verify {
        let q = construct(&phi, &ctx.tol)?;
        let root = d.delta().sqrt(&ctx.tol)?;
        let rebuilt = compare::compress(&q, &root, &ctx.tol)?;
        r.verified(
            "equivalence_to_compression",
            verify_equivalence_pointwise(&psi, &rebuilt, &ctx.cfg)?,
        );
    }
    Ok(Outcome {
        positive: true,
        report: r,
    })
}

fn compress(ctx: &Ctx, file: &Path, name: &str, element: &Path) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let map = valid_map(ctx, &problem, name)?;
    let q = construct(&map, &ctx.tol)?;
    let (t, s) = ElementFile::load(element)?.blocks(q.d_h(), q.d_k())?;
    let e = CommutantElement::new(t, s);
    let out = compare::compress(&q, &e, &ctx.tol)?;
    let check = validate_module_cp(&out, &ctx.tol);
    let mut r = report(
        ctx,
        "compress",
        file,
        &[name],
        &[("element", element.display().to_string())],
    );
    shape(&mut r, &map);
    r.verdict("valid", check.is_valid)
        .residual("commutant", e.residual(&q))
        .residual("consistency", check.residual);
    let module = out.module();
    for i in 0..module.dim() {
        let (a, b) = module.basis_pair(i);
        r.matrix(basis_key(&module, a, b), &out.images()[i]);
    }
    if ctx.verify {
        let qo = construct(&out, &ctx.tol)?;
        r.verified("factorization", verify_factorization(&qo, &out, &ctx.cfg));
    }
    Ok(Outcome {
        positive: check.is_valid,
        report: r,
    })
}

fn commutant_basis(ctx: &Ctx, file: &Path, name: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let map = valid_map(ctx, &problem, name)?;
    let q = construct(&map, &ctx.tol)?;
    let basis = commutant(&q, &ctx.tol);
    let mut r = report(ctx, "commutant", file, &[name], &[]);
    shape(&mut r, &map);
    r.dimension("commutant", basis.dim())
        .dimension("H_dilation", q.d_h())
        .dimension("K_dilation", q.d_k());
    let worst = basis.elements().iter().fold(0.0f64, |acc, e| acc.max(e.residual(&q)));
    r.residual("commutation", worst);
    for (i, e) in basis.elements().iter().enumerate() {
        r.matrix(format!("T_{}", i + 1), &e.t)
            .matrix(format!("S_{}", i + 1), &e.s);
    }
    Ok(Outcome {
        positive: true,
        report: r,
    })
}

fn purity(ctx: &Ctx, file: &Path, name: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let map = valid_map(ctx, &problem, name)?;
    let verdict = is_pure(&map, &ctx.tol)?;
    let mut r = report(ctx, "purity", file, &[name], &[]);
    shape(&mut r, &map);
    r.verdict("pure", verdict.pure)
        .dimension("commutant", verdict.commutant_dim);
    if ctx.verify {
        let q = construct(&map, &ctx.tol)?;
        r.verified("factorization", verify_factorization(&q, &map, &ctx.cfg));
    }
    Ok(Outcome {
        positive: verdict.pure,
        report: r,
    })
}

fn reconstruct(ctx: &Ctx, file: &Path, a: &str, b: &str) -> Result<Outcome, CliError> {
    let problem = ProblemFile::load(file)?;
    let (psi, phi) = (valid_map(ctx, &problem, a)?, valid_map(ctx, &problem, b)?);
    let tol = &ctx.tol;
    let q = construct(&phi, tol)?;
    let d = rn_derivative(&psi, &phi, tol)?;
    let rebuilt = reconstruct_stinespring(&q, &d, tol)?;
    let direct = construct(&psi, tol)?;
    let (same, witness) = quintuples_unitarily_equivalent(&rebuilt.quintuple, &direct, tol)?;
    let inv = rebuilt.quintuple.invariants(&psi, tol);
    let mut r = report(ctx, "reconstruct", file, &[a, b], &[]);
    shape(&mut r, &phi);
    r.verdict("equivalent_to_construction", same)
        .verdict("invariants_hold", inv.all_hold(tol))
        .residual("quintuple_equivalence", witness.max_residual)
        .residual("factorization", inv.factorization)
        .residual("coisometry", inv.coisometry);
    quintuple_matrices(&mut r, &rebuilt.quintuple);
    r.matrix("connecting", &rebuilt.connecting);
    r.warnings = rebuilt.warnings.clone();
    if ctx.verify {
        r.verified(
            "factorization",
            verify_factorization(&rebuilt.quintuple, &psi, &ctx.cfg),
        );
    }
    Ok(Outcome {
        positive: same && inv.all_hold(tol),
        report: r,
    })
}
