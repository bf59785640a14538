use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use lapsep::generate::{self, InstanceClass, InstanceKind};
use lapsep::io::{self, Format};
use lapsep::{
    classify as run_classify, entanglement_witness, partial_transpose, verify_decomposition,
    RealMatrix, TensorShape, Verdict,
};

use crate::report::{RunReport, Timings};
use crate::{InputFormat, InputOpts};

pub const EXIT_OK: u8 = 0;
pub const EXIT_ENTANGLED: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_INVALID: u8 = 3;

/// A failure that aborts the command with exit code 3.
#[derive(Debug)]
pub struct Fatal(String);

impl fmt::Display for Fatal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Fatal {
    fn at(path: &Path, e: impl fmt::Display) -> Self {
        Fatal(format!("{}: {e}", path.display()))
    }
}

struct Loaded {
    shape: TensorShape,
    matrix: RealMatrix,
    parse_time: Duration,
}

fn read(path: &Path) -> Result<String, Fatal> {
    fs::read_to_string(path).map_err(|e| Fatal::at(path, e))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Fatal> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Fatal::at(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Reads a matrix file, or a graph file as its normalized Laplacian.
fn load(path: &Path, format: Option<InputFormat>) -> Result<Loaded, Fatal> {
    let text = read(path)?;
    let start = Instant::now();
    let format = match format {
        Some(InputFormat::Matrix) => Format::Matrix,
        Some(InputFormat::Graph) => Format::Graph,
        None => io::detect_format(&text).map_err(|e| Fatal::at(path, e))?,
    };
    let (shape, matrix) = match format {
        Format::Matrix => {
            let f = io::parse_matrix(&text).map_err(|e| Fatal::at(path, e))?;
            (f.shape, f.matrix)
        }
        Format::Graph => {
            let g = io::parse_graph(&text).map_err(|e| Fatal::at(path, e))?;
            let m = g.laplacian_density().map_err(|e| Fatal::at(path, e))?;
            (g.shape(), m)
        }
        Format::Decomposition => {
            return Err(Fatal::at(
                path,
                "expected a matrix or graph file, found a decomposition",
            ))
        }
    };
    Ok(Loaded {
        shape,
        matrix,
        parse_time: start.elapsed(),
    })
}

fn exit_code(v: &Verdict) -> u8 {
    match v {
        Verdict::Separable { .. } | Verdict::SeparableNonConstructive { .. } => EXIT_OK,
        Verdict::Entangled { .. } => EXIT_ENTANGLED,
        Verdict::Unknown => EXIT_UNKNOWN,
        Verdict::Invalid { .. } => EXIT_INVALID,
    }
}

fn classify_one(path: &Path, opts: &InputOpts) -> RunReport {
    let loaded = match load(path, opts.format) {
        Ok(l) => l,
        Err(e) => {
            return RunReport {
                input: path.to_path_buf(),
                verdict: "Invalid".into(),
                reason: Some(e.to_string()),
                tol: opts.tol,
                exit_code: EXIT_INVALID,
                ..Default::default()
            }
        }
    };
    let start = Instant::now();
    let c = run_classify(&loaded.matrix, loaded.shape, opts.tol);
    let mut r = RunReport::from_classification(path.to_path_buf(), &c, opts.tol);
    r.timings = Timings::new(loaded.parse_time, start.elapsed());
    r.exit_code = exit_code(&c.verdict);
    r
}

pub fn classify(
    inputs: &[PathBuf],
    opts: &InputOpts,
    json: bool,
    jobs: usize,
) -> Result<u8, Fatal> {
    let jobs = jobs.clamp(1, inputs.len().max(1));
    let chunk = inputs.len().div_ceil(jobs);
    let reports: Vec<RunReport> = thread::scope(|s| {
        let handles: Vec<_> = inputs
            .chunks(chunk.max(1))
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|p| classify_one(p, opts))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let many = inputs.len() > 1;
    for r in &reports {
        r.print(json, many);
    }
    Ok(reports.iter().map(|r| r.exit_code).max().unwrap_or(EXIT_OK))
}

pub fn decompose(
    input: &Path,
    out: Option<&Path>,
    opts: &InputOpts,
    json: bool,
) -> Result<u8, Fatal> {
    let loaded = load(input, opts.format)?;
    let start = Instant::now();
    let c = run_classify(&loaded.matrix, loaded.shape, opts.tol);
    let mut report = RunReport::from_classification(input.to_path_buf(), &c, opts.tol);
    report.timings = Timings::new(loaded.parse_time, start.elapsed());
    let code = match &c.verdict {
        Verdict::Separable { decomposition, .. } => {
            let text = io::write_decomposition(decomposition);
            // Check what was serialized, not what is in memory.
            let reread =
                io::parse_decomposition(&text).map_err(|e| Fatal(format!("re-read: {e}")))?;
            let check = verify_decomposition(&loaded.matrix, &reread, opts.tol)
                .map_err(|e| Fatal(format!("verification: {e}")))?;
            if !check.valid {
                return Err(Fatal(format!(
                    "decomposition failed verification (max error {:e}, weight sum {})",
                    check.max_error, check.weight_sum
                )));
            }
            report.max_error = Some(check.max_error);
            report.weight_sum = Some(check.weight_sum);
            write_or_print(out, &text)?;
            report.artifacts.extend(out.map(Path::to_path_buf));
            EXIT_OK
        }
        Verdict::SeparableNonConstructive { .. } => EXIT_UNKNOWN,
        v => exit_code(v),
    };
    report.exit_code = code;
    if out.is_some() {
        report.print(json, false);
    } else if json {
        eprintln!(
            "{}",
            serde_json::to_string(&report).expect("report serializes")
        );
    } else {
        eprintln!("{report}");
    }
    Ok(code)
}

pub fn verify(
    input: &Path,
    decomposition: &Path,
    opts: &InputOpts,
    json: bool,
) -> Result<u8, Fatal> {
    let loaded = load(input, opts.format)?;
    let d =
        io::parse_decomposition(&read(decomposition)?).map_err(|e| Fatal::at(decomposition, e))?;
    if d.shape != loaded.shape {
        return Err(Fatal(format!(
            "shape mismatch: matrix is {}x{}, decomposition is {}x{}",
            loaded.shape.p(),
            loaded.shape.q(),
            d.shape.p(),
            d.shape.q()
        )));
    }
    let start = Instant::now();
    let check = verify_decomposition(&loaded.matrix, &d, opts.tol)
        .map_err(|e| Fatal::at(decomposition, e))?;
    let code = if check.valid { EXIT_OK } else { EXIT_ENTANGLED };
    if json {
        let report = RunReport {
            input: input.to_path_buf(),
            verdict: if check.valid { "Valid" } else { "Invalid" }.into(),
            terms: Some(d.terms.len()),
            max_error: Some(check.max_error),
            weight_sum: Some(check.weight_sum),
            tol: opts.tol,
            timings: Timings::new(loaded.parse_time, start.elapsed()),
            exit_code: code,
            ..Default::default()
        };
        report.print(true, false);
    } else {
        println!(
            "{}, {} terms, max error {:e}, weight sum {}",
            if check.valid { "valid" } else { "invalid" },
            d.terms.len(),
            check.max_error,
            check.weight_sum
        );
    }
    Ok(code)
}

pub fn ptranspose(input: &Path, out: Option<&Path>, opts: &InputOpts) -> Result<u8, Fatal> {
    let loaded = load(input, opts.format)?;
    let pt = partial_transpose(&loaded.matrix, loaded.shape).map_err(|e| Fatal::at(input, e))?;
    let text = io::write_matrix(loaded.shape, &pt).map_err(|e| Fatal::at(input, e))?;
    write_or_print(out, &text)?;
    Ok(EXIT_OK)
}

pub fn witness(input: &Path, opts: &InputOpts, json: bool) -> Result<u8, Fatal> {
    let loaded = load(input, opts.format)?;
    let start = Instant::now();
    let w = entanglement_witness(&loaded.matrix, loaded.shape, opts.tol)
        .map_err(|e| Fatal::at(input, e))?;
    if json {
        let report = RunReport {
            input: input.to_path_buf(),
            verdict: if w.is_some() { "Witness" } else { "None" }.into(),
            witness_eigenvalue: w.as_ref().map(|w| w.eigenvalue),
            witness_vector: w
                .as_ref()
                .map(|w| w.vector.iter().map(|z| [z.re, z.im]).collect()),
            tol: opts.tol,
            timings: Timings::new(loaded.parse_time, start.elapsed()),
            ..Default::default()
        };
        report.print(true, false);
        return Ok(EXIT_OK);
    }
    match w {
        Some(w) => {
            println!("witness eigenvalue {}", w.eigenvalue);
            let v: Vec<String> = w
                .vector
                .iter()
                .map(|z| format!("{:?} {:?}", z.re, z.im))
                .collect();
            println!("{}", v.join(" "));
        }
        None => println!("none"),
    }
    Ok(EXIT_OK)
}

pub fn gen(
    class: InstanceClass,
    kind: InstanceKind,
    p: usize,
    q: usize,
    seed: u64,
    out: Option<&Path>,
    format: InputFormat,
) -> Result<u8, Fatal> {
    let shape = TensorShape::new(p, q).map_err(|e| Fatal(e.to_string()))?;
    let mut rng = generate::rng(seed);
    let inst =
        generate::generate(&mut rng, class, kind, shape).map_err(|e| Fatal(e.to_string()))?;
    let text = match format {
        InputFormat::Matrix => {
            io::write_matrix(shape, &inst.matrix).map_err(|e| Fatal(e.to_string()))?
        }
        InputFormat::Graph => match &inst.graph {
            Some(g) => io::write_graph(g),
            None => return Err(Fatal("this instance has no generating graph".into())),
        },
    };
    write_or_print(out, &text)?;
    if let (Some(out), Some(d)) = (out, &inst.decomposition) {
        let mut side = out.as_os_str().to_owned();
        side.push(".decomp");
        let side = PathBuf::from(side);
        fs::write(&side, io::write_decomposition(d)).map_err(|e| Fatal::at(&side, e))?;
    }
    Ok(EXIT_OK)
}
