//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lapsep::circulation::decompose_circulation;
use lapsep::generate::{self, InstanceClass, InstanceKind};
use lapsep::io;
use lapsep::linalg::{inner, vec_norm};
use lapsep::{
    blockwise_line_sum_symmetric, classify, entanglement_witness, is_psd, partial_transpose,
    row_sums_match_after_pt, separable_decomposition, verify_decomposition, Complex64, GridIndex,
    MatrixClass, RealMatrix, TensorShape, Verdict, WeightedGraph,
};
use nalgebra::DMatrix;
use rand::Rng;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {{
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    }};
}

fn shape(p: usize, q: usize) -> TensorShape {
    TensorShape::new(p, q).expect("positive shape")
}

fn lib<T>(r: lapsep::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn pt_algebra() -> Check {
    let mut rng = generate::rng(101);
    let mut moved = 0usize;
    for case in 0..1000 {
        let s = shape(rng.gen_range(1..=6), rng.gen_range(1..=6));
        let n = s.n();
        // Dyadic entries keep every sum exact, so equality can be bitwise.
        let mut a = RealMatrix::from_fn(n, |_, _| rng.gen_range(-800i32..=800) as f64 / 8.0);
        let symmetric = case % 2 == 1;
        if symmetric {
            a = a.add(&a.transpose()).map_err(|e| e.to_string())?;
        }
        let pt = lib(partial_transpose(&a, s))?;
        ensure!(
            lib(partial_transpose(&pt, s))? == a,
            "case {case}: involution failed"
        );
        ensure!(pt.trace() == a.trace(), "case {case}: trace changed");
        ensure!(
            pt.total_sum() == a.total_sum(),
            "case {case}: total sum changed"
        );
        for r in 0..n {
            for c in 0..n {
                if lib(s.is_entangled_position(r + 1, c + 1))? {
                    moved += 1;
                    continue;
                }
                // Same grid row or column: the entry stays put or swaps with
                // its mirror, so symmetric matrices keep it exactly.
                let (x, y) = (lib(s.unflatten(r + 1))?, lib(s.unflatten(c + 1))?);
                let expected = if x.j == y.j { a[(r, c)] } else { a[(c, r)] };
                ensure!(
                    pt[(r, c)] == expected,
                    "case {case}: entry ({r},{c}) misplaced"
                );
                if symmetric {
                    ensure!(
                        pt[(r, c)] == a[(r, c)],
                        "case {case}: fixed entry ({r},{c}) changed"
                    );
                }
            }
        }
    }
    Ok(format!(
        "1000 matrices, {moved} entangled positions exchanged"
    ))
}

fn s10_instance(rng: &mut impl Rng, s: TensorShape, k: usize) -> Result<RealMatrix, String> {
    let kind = [
        InstanceKind::Separable,
        InstanceKind::Entangled,
        InstanceKind::Random,
    ][k % 3];
    Ok(lib(generate::generate(rng, InstanceClass::S10, kind, s))?.matrix)
}

fn zero_row_sum_equivalence() -> Check {
    let mut rng = generate::rng(202);
    let (mut psd, mut not_psd) = (0, 0);
    for case in 0..500 {
        let s = shape(2, 2 + case % 5);
        let a = s10_instance(&mut rng, s, case)?;
        let rows = lib(row_sums_match_after_pt(&a, s, 1e-9))?.matches;
        let pt = lib(partial_transpose(&a, s))?;
        let positive = lib(is_psd(&pt, 1e-9))?.psd;
        ensure!(
            rows == positive,
            "case {case} ({s:?}): row sums match = {rows}, PSD = {positive}"
        );
        if positive {
            psd += 1;
        } else {
            not_psd += 1;
        }
    }
    Ok(format!(
        "500 matrices ({psd} PPT, {not_psd} not), zero exceptions"
    ))
}

fn constructive_separability() -> Check {
    let mut rng = generate::rng(303);
    let (mut worst_err, mut worst_sum, mut worst_unit, mut terms) =
        (0.0f64, 0.0f64, 0.0f64, 0usize);
    for (class, mclass) in [
        (InstanceClass::S1, MatrixClass::S),
        (InstanceClass::V1, MatrixClass::V),
    ] {
        for case in 0..200 {
            let s = shape(rng.gen_range(2..=4), rng.gen_range(2..=5));
            let inst = lib(generate::generate(
                &mut rng,
                class,
                InstanceKind::Separable,
                s,
            ))?;
            ensure!(
                lib(blockwise_line_sum_symmetric(&inst.matrix, s, 1e-9))?.holds,
                "{class:?} case {case}: blocks not LSS"
            );
            let d = lib(separable_decomposition(&inst.matrix, s, mclass))?;
            let v = lib(verify_decomposition(&inst.matrix, &d, 1e-10))?;
            ensure!(
                v.max_error <= 1e-10,
                "{class:?} case {case}: error {:e}",
                v.max_error
            );
            ensure!(
                d.terms.iter().all(|t| t.weight >= 0.0),
                "{class:?} case {case}: negative weight"
            );
            ensure!(
                (v.weight_sum - 1.0).abs() <= 1e-12,
                "{class:?} case {case}: weights sum to {}",
                v.weight_sum
            );
            for t in &d.terms {
                let dev = (vec_norm(&t.a) - 1.0)
                    .abs()
                    .max((vec_norm(&t.b) - 1.0).abs());
                ensure!(
                    dev <= 1e-12,
                    "{class:?} case {case}: factor norm off by {dev:e}"
                );
                worst_unit = worst_unit.max(dev);
            }
            worst_err = worst_err.max(v.max_error);
            worst_sum = worst_sum.max((v.weight_sum - 1.0).abs());
            terms += d.terms.len();
        }
    }
    Ok(format!(
        "400 instances, {terms} terms, max error {worst_err:.1e}, weight-sum dev {worst_sum:.1e}, norm dev {worst_unit:.1e}"
    ))
}

fn circulation_decomposition() -> Check {
    let mut rng = generate::rng(404);
    let mut worst = 0.0f64;
    for case in 0..500 {
        let q = rng.gen_range(1..=12);
        let (b, _) = generate::random_circulation(&mut rng, q, 8);
        let d = lib(decompose_circulation(&b, 1e-12))?;
        let err = lib(d.reconstruct().max_abs_diff(&b))?;
        ensure!(err <= 1e-12, "case {case}: reconstruction error {err:e}");
        let nnz = b.as_slice().iter().filter(|x| **x != 0.0).count();
        ensure!(
            d.terms.len() <= nnz,
            "case {case}: {} terms for {nnz} nonzeros",
            d.terms.len()
        );
        for t in &d.terms {
            let mut nodes = t.circuit.nodes().to_vec();
            nodes.sort_unstable();
            nodes.dedup();
            ensure!(
                nodes.len() == t.circuit.len(),
                "case {case}: repeated node in {}",
                t.circuit
            );
        }
        worst = worst.max(err);
    }
    Ok(format!("500 circulations, max error {worst:.1e}"))
}

fn star_graphs_entangled() -> Check {
    let mut rng = generate::rng(505);
    let mut worst = f64::NEG_INFINITY;
    for case in 0..50 {
        let s = shape(rng.gen_range(2..=5), rng.gen_range(2..=5));
        let g = lib(generate::star_graph(&mut rng, s))?;
        let rho = lib(g.laplacian_density())?;
        match classify(&rho, s, 1e-9).verdict {
            Verdict::Entangled { witness, .. } => {
                ensure!(
                    witness.eigenvalue < 0.0,
                    "case {case}: witness value {}",
                    witness.eigenvalue
                );
                let value = lib(witness.evaluate(&rho, s))?;
                ensure!(value < 0.0, "case {case}: witness evaluates to {value}");
                worst = worst.max(witness.eigenvalue);
            }
            v => return Err(format!("case {case} ({s:?}): verdict {}", v.kind())),
        }
    }
    Ok(format!(
        "50 star graphs, least negative witness value {worst:.3e}"
    ))
}

fn low_dimension_cross_check() -> Check {
    let mut rng = generate::rng(606);
    let mut counts = [0usize; 2];
    for s in [shape(2, 2), shape(2, 3)] {
        for case in 0..200 {
            let a = s10_instance(&mut rng, s, case)?;
            let constructive = lib(row_sums_match_after_pt(&a, s, 1e-9))?.matches;
            let ppt = lib(is_psd(&lib(partial_transpose(&a, s))?, 1e-9))?.psd;
            ensure!(
                constructive == ppt,
                "{s:?} case {case}: row-sum test {constructive}, PPT {ppt}"
            );
            let verdict = classify(&a, s, 1e-9).verdict;
            let agrees = match &verdict {
                Verdict::Separable { .. } | Verdict::SeparableNonConstructive { .. } => ppt,
                Verdict::Entangled { .. } => !ppt,
                _ => false,
            };
            ensure!(
                agrees,
                "{s:?} case {case}: verdict {} but PPT {ppt}",
                verdict.kind()
            );
            counts[usize::from(ppt)] += 1;
        }
    }
    Ok(format!(
        "400 instances ({} separable, {} entangled), all agree",
        counts[1], counts[0]
    ))
}

fn single_edge_golden() -> Check {
    let s = shape(2, 2);
    let g = lib(WeightedGraph::new(
        s,
        [(GridIndex::new(1, 1), GridIndex::new(2, 2), 1.0)],
    ))?;
    let rho = lib(g.laplacian_density())?;
    let pt = lib(partial_transpose(&rho, s))?;
    let oracle = DMatrix::from_fn(4, 4, |r, c| pt[(r, c)]).symmetric_eigen();
    let oracle_min = oracle
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    ensure!(
        (oracle_min + 0.5).abs() <= 1e-12,
        "oracle minimum {oracle_min}"
    );
    let w = lib(entanglement_witness(&rho, s, 1e-9))?.ok_or("no witness")?;
    ensure!(
        (w.eigenvalue + 0.5).abs() <= 1e-12,
        "witness eigenvalue {}",
        w.eigenvalue
    );
    ensure!(
        (w.eigenvalue - oracle_min).abs() <= 1e-12,
        "engine and oracle disagree"
    );
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let target: Vec<Complex64> = [0.0, h, h, 0.0]
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    let overlap = inner(&target, &w.vector).norm();
    ensure!(
        (overlap - 1.0).abs() <= 1e-12,
        "overlap with (0,1,1,0)/sqrt2 is {overlap}"
    );
    match classify(&rho, s, 1e-9).verdict {
        Verdict::Entangled { witness, .. } => {
            ensure!(
                (witness.eigenvalue + 0.5).abs() <= 1e-12,
                "classify witness {}",
                witness.eigenvalue
            )
        }
        v => return Err(format!("classify gave {}", v.kind())),
    }
    Ok(format!(
        "eigenvalue {}, |overlap| = {overlap}",
        w.eigenvalue
    ))
}

fn graph_matrix_consistency() -> Check {
    let mut rng = generate::rng(808);
    let mut equal = 0;
    for case in 0..100 {
        let s = loop {
            let s = shape(rng.gen_range(1..=5), rng.gen_range(1..=5));
            if s.n() >= 2 {
                break s;
            }
        };
        let g = lib(generate::random_graph(&mut rng, s, 0.35, |r| {
            r.gen_range(0.1..3.0)
        }))?;
        let reflected = g.partial_transpose().graph;
        ensure!(
            reflected.adjacency() == lib(partial_transpose(&g.adjacency(), s))?,
            "case {case}: adjacency of reflected graph differs"
        );
        let by_degree = g.degree_criterion().equal;
        let by_matrix = lib(row_sums_match_after_pt(
            &lib(g.laplacian_density())?,
            s,
            1e-9,
        ))?
        .matches;
        ensure!(
            by_degree == by_matrix,
            "case {case}: degree test {by_degree}, row-sum test {by_matrix}"
        );
        equal += usize::from(by_degree);
    }
    Ok(format!("100 graphs ({equal} with matching degrees)"))
}

fn lapsep(args: &[&str], dir: &Path) -> Result<i32, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_lapsep"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    out.status.code().ok_or_else(|| "killed by signal".into())
}

fn round_trips<T: PartialEq>(
    path: &Path,
    parse: impl Fn(&str) -> lapsep::Result<T>,
    write: impl Fn(&T) -> String,
) -> Result<(), String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let value = parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let again = write(&value);
    ensure!(
        again == text,
        "{}: write(read(file)) differs from file",
        path.display()
    );
    ensure!(
        parse(&again).map_err(|e| e.to_string())? == value,
        "{}: read(write(x)) != x",
        path.display()
    );
    Ok(())
}

fn cli_round_trips() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = dir.path();
    let mut rng = generate::rng(909);
    let (mut matrices, mut graphs, mut decomps, mut verified) = (0, 0, 0, 0);
    let write_matrix =
        |f: &io::MatrixFile| io::write_matrix(f.shape, &f.matrix).expect("shape matches");
    for k in 0..50 {
        let class = ["s10", "s1", "v1"][k % 3];
        let kind = ["separable", "entangled", "random"][(k / 3) % 3];
        let (p, q) = (
            rng.gen_range(2..=3).to_string(),
            rng.gen_range(2..=4).to_string(),
        );
        let seed = k.to_string();
        let m = format!("m{k}");
        let code = lapsep(
            &[
                "gen", class, &p, &q, "--kind", kind, "--seed", &seed, "-o", &m,
            ],
            dir,
        )?;
        ensure!(code == 0, "gen {class} {kind} {p}x{q} exited {code}");
        round_trips(&dir.join(&m), io::parse_matrix, write_matrix)?;
        matrices += 1;
        let side = dir.join(format!("{m}.decomp"));
        if side.exists() {
            round_trips(&side, io::parse_decomposition, io::write_decomposition)?;
            ensure!(
                lapsep(&["verify", &m, &format!("{m}.decomp")], dir)? == 0,
                "{m}: sidecar fails verify"
            );
            decomps += 1;
        }
        if class == "s10" && kind != "separable" {
            let g = format!("g{k}");
            let code = lapsep(
                &[
                    "gen", class, &p, &q, "--kind", kind, "--seed", &seed, "--format", "graph",
                    "-o", &g,
                ],
                dir,
            )?;
            ensure!(code == 0, "gen --format graph exited {code}");
            round_trips(&dir.join(&g), io::parse_graph, io::write_graph)?;
            graphs += 1;
        }
        let d = format!("d{k}");
        if lapsep(&["decompose", &m, "-o", &d], dir)? == 0 {
            round_trips(
                &dir.join(&d),
                io::parse_decomposition,
                io::write_decomposition,
            )?;
            let code = lapsep(&["verify", &m, &d], dir)?;
            ensure!(
                code == 0,
                "verify of decompose output for {m} exited {code}"
            );
            verified += 1;
        }
    }
    ensure!(
        graphs > 0 && decomps > 0 && verified > 0,
        "a format was never exercised"
    );
    Ok(format!(
        "{matrices} matrix, {graphs} graph, {} decomposition files; {verified} decompose outputs verified",
        decomps + verified
    ))
}

struct Criterion {
    id: usize,
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Check,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            title: "partial transpose algebra",
            limit: secs(5),
            run: pt_algebra,
        },
        Criterion {
            id: 2,
            title: "zero-row-sum PPT equivalence (p = 2)",
            limit: secs(30),
            run: zero_row_sum_equivalence,
        },
        Criterion {
            id: 3,
            title: "constructive separability",
            limit: secs(60),
            run: constructive_separability,
        },
        Criterion {
            id: 4,
            title: "circulation decomposition",
            limit: secs(10),
            run: circulation_decomposition,
        },
        Criterion {
            id: 5,
            title: "star graphs are entangled",
            limit: None,
            run: star_graphs_entangled,
        },
        Criterion {
            id: 6,
            title: "low-dimension cross-check",
            limit: None,
            run: low_dimension_cross_check,
        },
        Criterion {
            id: 7,
            title: "single crossing edge witness",
            limit: None,
            run: single_edge_golden,
        },
        Criterion {
            id: 8,
            title: "graph/matrix consistency",
            limit: None,
            run: graph_matrix_consistency,
        },
        Criterion {
            id: 9,
            title: "CLI file round trips",
            limit: None,
            run: cli_round_trips,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match result {
            Ok(d) => match c.limit {
                Some(limit) if elapsed > limit => {
                    (false, format!("{d}; too slow (limit {limit:?})"))
                }
                _ => (true, d),
            },
            Err(e) => (false, e),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {}: {} [{:.2} s] {}",
            if ok { "PASS" } else { "FAIL" },
            c.id,
            c.title,
            elapsed.as_secs_f64(),
            detail
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
