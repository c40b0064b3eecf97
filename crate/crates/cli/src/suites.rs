//! Check-task builders: each suite expands the corpus into independent
//! closures producing `CheckReport`s.

use crate::manifest::Suite;
use torus_nse_core::bands;
use torus_nse_core::certify;
use torus_nse_core::corpus::CorpusItem;
use torus_nse_core::grid::GridSpec;
use torus_nse_core::norms;
use torus_nse_core::nse;
use torus_nse_core::report::CheckReport;
use torus_nse_core::solutions;
use torus_nse_core::spectral;

pub struct Task {
    pub suite: Suite,
    pub name: String,
    pub run: Box<dyn FnOnce() -> anyhow::Result<Vec<CheckReport>> + Send>,
}

fn task(
    suite: Suite,
    name: impl Into<String>,
    run: impl FnOnce() -> anyhow::Result<Vec<CheckReport>> + Send + 'static,
) -> Task {
    Task {
        suite,
        name: name.into(),
        run: Box::new(run),
    }
}

/// Points sampled per analytic solution in the pointwise audits.
const ANALYTIC_SAMPLES: usize = 1000;

pub fn build_tasks(
    suite: Suite,
    grid: GridSpec,
    corpus: &[std::sync::Arc<CorpusItem>],
    base_seed: u64,
) -> Vec<Task> {
    match suite {
        Suite::Identity => identity_tasks(corpus),
        Suite::Certify => certify_tasks(grid, corpus, base_seed),
        Suite::Bands => bands_tasks(grid, corpus),
        Suite::Bootstrap => bootstrap_tasks(corpus),
        Suite::Units => vec![task(Suite::Units, "units-fixtures", || {
            Ok(certify::units_fixture_checks())
        })],
        Suite::All => unreachable!("expanded before task construction"),
    }
}

fn identity_tasks(corpus: &[std::sync::Arc<CorpusItem>]) -> Vec<Task> {
    let mut tasks = Vec::new();
    // Linear-operator energy identity, on a closed-form pair and on a
    // random scalar advected by the first corpus velocity.
    let advecting = corpus.iter().find_map(|item| match &**item {
        CorpusItem::Grid(state) => Some((state.v.clone(), state.v.grid)),
        CorpusItem::Analytic(_) => None,
    });
    if let Some((x_field, grid)) = advecting {
        tasks.push(task(Suite::Identity, "linear-energy", move || {
            let mut out = Vec::new();
            let f_sine = solutions::sine_scalar(grid, &[([1, 0, 0], 1.0)]);
            out.extend(nse::linear_operator_energy_audit(
                &f_sine, &x_field, 1.0, "sine",
            )?);
            let f_rand =
                solutions::random_divfree_velocity(grid, 0x11e, (1.0, 4.0), 1.0)?.component(0);
            out.extend(nse::linear_operator_energy_audit(
                &f_rand, &x_field, 0.7, "random",
            )?);
            Ok(out)
        }));
    }
    for item in corpus {
        let item = item.clone();
        let name = format!("identity[{}]", item.field_id());
        tasks.push(task(Suite::Identity, name, move || match &*item {
            CorpusItem::Grid(state) => Ok(nse::state_identity_reports(state)?),
            CorpusItem::Analytic(sol) => Ok(solutions::analytic_pointwise_checks(
                sol,
                1.0,
                ANALYTIC_SAMPLES,
                0x0a11,
            )),
        }));
    }
    tasks
}

fn certify_tasks(
    _grid: GridSpec,
    corpus: &[std::sync::Arc<CorpusItem>],
    base_seed: u64,
) -> Vec<Task> {
    let mut tasks = vec![
        task(Suite::Certify, "peetre", move || {
            let (_, reports) = certify::peetre_certify(base_seed, 100_000);
            Ok(reports)
        }),
        task(Suite::Certify, "pointwise-bounds", move || {
            Ok(vec![
                certify::hadamard_cross_certify(base_seed ^ 0x01, 10_000),
                certify::power_inequality_certify(),
            ])
        }),
        task(Suite::Certify, "nodal-bounds", move || {
            let small = GridSpec::new(8, std::f64::consts::TAU, 3)?;
            let tiny = GridSpec::new(4, std::f64::consts::TAU, 1)?;
            Ok(vec![
                certify::holder_cross_certify(small, base_seed ^ 0x02, (2.0, 6.0))?,
                certify::holder_cross_certify(small, base_seed ^ 0x03, (3.0, 3.0))?,
                certify::young_star_certify(tiny, base_seed ^ 0x04, (1.0, 2.0))?,
                certify::young_star_certify(tiny, base_seed ^ 0x05, (2.0, 2.0))?,
            ])
        }),
        task(Suite::Certify, "submultiplicativity", move || {
            let small = GridSpec::new(8, std::f64::consts::TAU, 3)?;
            certify::submultiplicativity_certify(
                small,
                base_seed ^ 0x06,
                250,
                &[0.0, 0.5, 1.0, 2.5],
            )
            .map_err(Into::into)
        }),
        task(Suite::Certify, "isoperimetric-diagnostics", move || {
            let g = GridSpec::new(32, std::f64::consts::TAU, 10)?;
            let radius = 0.35 * g.length();
            let mut out = Vec::new();
            for shape in [
                certify::BumpShape::PolynomialDome { m: 2 },
                certify::BumpShape::PolynomialDome { m: 3 },
                certify::BumpShape::PolynomialDome { m: 4 },
                certify::BumpShape::Plateau {
                    plateau_fraction: 0.3,
                },
                certify::BumpShape::Plateau {
                    plateau_fraction: 0.6,
                },
            ] {
                out.push(certify::gn_isoperimetric_diagnostic(g, shape, radius)?);
            }
            Ok(out)
        }),
    ];
    // Split bounds over the grid corpus states.
    for item in corpus {
        if !matches!(&**item, CorpusItem::Grid(_)) {
            continue;
        }
        let item = item.clone();
        let name = format!("split-bounds[{}]", item.field_id());
        tasks.push(task(Suite::Certify, name, move || {
            let CorpusItem::Grid(state) = &*item else {
                unreachable!()
            };
            let mut out = Vec::new();
            for kappa in [-0.4, 0.0, 0.4] {
                out.push(certify::kappa_split_certify(&state.v, kappa)?);
            }
            out.extend(certify::wiener_split_certify(&state.v)?);
            out.push(certify::sup_bound_certify(&state.v, &state.field_id)?);
            for rho in [1.0, 2.0] {
                out.push(certify::high_band_l2_certify(
                    &state.v,
                    rho,
                    &state.field_id,
                )?);
            }
            out.extend(certify::sobolev_quotient_diagnostics(
                &state.v,
                state.nu,
                &state.field_id,
            )?);
            out.push(certify::vsw_monotonicity_certify(&state.v, 0.0, 1.0)?);
            out.push(certify::vsw_monotonicity_certify(&state.v, 1.0, 2.5)?);
            Ok(out)
        }));
    }
    tasks
}

fn bands_tasks(grid: GridSpec, corpus: &[std::sync::Arc<CorpusItem>]) -> Vec<Task> {
    let mut tasks = vec![
        task(Suite::Bands, "cutoff-profiles", move || {
            let alpha = bands::build_cutoff(bands::CutoffKind::LowPass, 1.0, 2.0)?;
            let mut out = vec![
                alpha.invariants_check(&grid),
                alpha.complement().invariants_check(&grid),
                bands::partition_of_unity_check(&alpha, &grid),
                bands::band_disjointness_check(&alpha, &grid),
            ];
            for eps in [0.25, 0.5] {
                out.push(bands::plateau_identity_check(&alpha, eps, &grid));
            }
            out.push(torus_nse_core::operators::curl_symbol_hermitian_check(
                &grid,
            ));
            Ok(out)
        }),
        task(Suite::Bands, "commutator-kernel", move || {
            let (config, orders) = commutator_reference_config()?;
            let mut out = Vec::new();
            let mut last = f64::INFINITY;
            let mut monotone = true;
            for order in orders {
                let (_, report) =
                    bands::commutator_kernel(&config.beta, &config.w, &config.u, order)?;
                monotone &= report.residual < last;
                last = report.residual;
                out.push(report);
            }
            out.push(CheckReport::residual(
                "commutator-kernel-order-decay",
                "kernel-error-monotone-in-order",
                "commutator",
                "n=16",
                if monotone { 0.0 } else { 1.0 },
                0.0,
            ));
            Ok(out)
        }),
    ];
    // The band-decomposition audits are the heaviest per-state checks;
    // cover a deterministic half of the grid corpus (the reassembly
    // assertions are state-independent algebra, exercised on every shape
    // class that appears).
    for (i, item) in corpus
        .iter()
        .filter(|i| matches!(&***i, CorpusItem::Grid(_)))
        .enumerate()
    {
        if i % 2 != 0 {
            continue;
        }
        let item = item.clone();
        let name = format!("band-audits[{}]", item.field_id());
        tasks.push(task(Suite::Bands, name, move || {
            let CorpusItem::Grid(state) = &*item else {
                unreachable!()
            };
            let alpha = bands::build_cutoff(bands::CutoffKind::LowPass, 2.5, 4.0)?;
            let mut out = nse::stress_band_audit(state, &alpha)?;
            out.extend(nse::bending_band_audit(state, &alpha)?);
            // Leray factorization on real data.
            out.push(torus_nse_core::operators::leray_factorization_check(
                &state.v,
                &state.field_id,
            ));
            Ok(out)
        }));
    }
    tasks
}

fn bootstrap_tasks(corpus: &[std::sync::Arc<CorpusItem>]) -> Vec<Task> {
    let mut tasks = Vec::new();
    for item in corpus {
        if !matches!(&**item, CorpusItem::Grid(_)) {
            continue;
        }
        let item = item.clone();
        let name = format!("bootstrap[{}]", item.field_id());
        tasks.push(task(Suite::Bootstrap, name, move || {
            let CorpusItem::Grid(state) = &*item else {
                unreachable!()
            };
            Ok(nse::bootstrap_spectral_audit_multi(
                state,
                &[0.0, 0.4, 1.0],
            )?)
        }));
    }
    tasks
}

/// The reference configuration for the commutator-kernel comparison: a
/// 16-node grid on a doubled box with a wide high-pass transition, smooth
/// single-mode inputs.
pub struct CommutatorConfig {
    pub beta: bands::CutoffProfile,
    pub w: spectral::SpectralScalar,
    pub u: spectral::SpectralScalar,
}

pub fn commutator_reference_config() -> anyhow::Result<(CommutatorConfig, Vec<usize>)> {
    let grid = GridSpec::new(16, 2.0 * std::f64::consts::TAU, 7)?;
    let beta = bands::build_cutoff(bands::CutoffKind::HighPass, 0.5, 12.0)?;
    let u = solutions::sine_scalar(grid, &[([1, 0, 0], 1.0)]);
    let w = solutions::sine_scalar(grid, &[([0, 5, 0], 1.0), ([3, 0, 0], 0.6)]);
    Ok((CommutatorConfig { beta, w, u }, vec![2, 4, 8]))
}

/// Norm-table rows for the grid corpus (the CSV side interface).
pub fn norm_table(corpus: &[std::sync::Arc<CorpusItem>]) -> anyhow::Result<String> {
    let mut out = String::from("field_id,norm_id,s_or_p,value\n");
    for item in corpus {
        let CorpusItem::Grid(state) = &**item else {
            continue;
        };
        let id = &state.field_id;
        let v = &state.v;
        let nodal = spectral::inverse_vector(v)?;
        for p in [2.0, 6.0] {
            let n = norms::lp_norm(&nodal, p)?;
            out.push_str(&norms::norm_csv_row(id, "lp", p, n.value));
        }
        out.push_str(&norms::norm_csv_row(
            id,
            "wiener",
            0.0,
            norms::wiener_norm(v)?.value,
        ));
        for s in [1.0, 2.5] {
            out.push_str(&norms::norm_csv_row(
                id,
                "vsw",
                s,
                norms::vsw_norm(v, s)?.value,
            ));
        }
        for s in [1.0, 2.0] {
            out.push_str(&norms::norm_csv_row(
                id,
                "hdot",
                s,
                norms::hdot_norm(v, s)?.value,
            ));
        }
    }
    Ok(out)
}
