use std::fs;
use std::path::{Path, PathBuf};

use cascade_mnl::cli::run;

pub struct Case {
    pub name: &'static str,
    pub args: Vec<String>,
    pub code: i32,
    /// a file the command writes, compared as `<name>.file`
    pub writes: Option<PathBuf>,
}

fn case(name: &'static str, code: i32, args: &[&str]) -> Case {
    Case { name, args: args.iter().map(|s| s.to_string()).collect(), code, writes: None }
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn cases(scratch: &Path) -> Vec<Case> {
    let pair = "tests/data/pair.json";
    let a1 = "tests/data/pair_assortment.json";
    let table = "tests/data/table.json";
    let mut v = vec![
        case("eval_pair.txt", 0, &["eval", pair, a1]),
        case("eval_pair.json", 0, &["--format", "json", "eval", pair, a1]),
        case("validate_capacity.json", 2, &["--format", "json", "validate", pair, "tests/data/pair_over_capacity.json"]),
        case("simulate_pair.json", 0, &["--format", "json", "simulate", pair, a1, "--trials", "20000", "--seed", "7"]),
        case("solve_acme_pair.json", 0, &["--format", "json", "solve", pair, "--method", "acme", "--epsilon", "0.5"]),
        case("solve_dp_pair.json", 0, &["--format", "json", "solve", pair, "--method", "dp", "--rho", "0.25", "--epsilon", "0.5"]),
        case("solve_exact_pair.json", 0, &["--format", "json", "solve", pair, "--method", "exact"]),
        case("solve_exact_p1_pair.json", 0, &["--format", "json", "solve", pair, "--method", "exact-p1", "--rho", "0.5"]),
        case("solve_single_stage_table.json", 0, &["--format", "json", "solve", table, "--method", "single-stage"]),
        case("solve_acme_table.json", 0, &["--format", "json", "solve", table, "--epsilon", "0.5"]),
        case("sweep_table.json", 0, &["--format", "json", "sweep", table, "--rhos", "0.25,0.5,0.75", "--epsilon", "0.5"]),
    ];
    let out = scratch.join("gen.json");
    let mut g = case("gen.json", 0, &["--format", "json", "gen", "--seed", "42", "--n", "4", "--m", "2", "--d", "2", "--w", "2", "--profile", "burnout", "-o"]);
    g.args.push(out.display().to_string());
    g.writes = Some(out);
    v.push(g);
    v
}

/// Runs a case, returning its exit code, its standard output and the file it
/// wrote, if any.
pub fn run_case(c: &Case) -> (i32, Vec<u8>, Option<Vec<u8>>) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(std::iter::once("cmnl".to_string()).chain(c.args.iter().cloned()), &mut out, &mut err);
    let written = c.writes.as_ref().map(|p| fs::read(p).expect("case output file"));
    (code, out, written)
}

/// Runs every case twice and compares both runs to the stored golden files.
/// With `update`, golden files are rewritten from the first run instead.
pub fn check_all(update: bool) -> Result<usize, String> {
    let dir = golden_dir();
    let mut problems = vec![];
    let mut count = 0;
    let scratch = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let runs: Vec<Vec<_>> = scratch.iter().map(|s| cases(s.path()).iter().map(run_case).collect()).collect();
    for (idx, c) in cases(scratch[0].path()).iter().enumerate() {
        let (first, second) = (&runs[0][idx], &runs[1][idx]);
        if first != second {
            problems.push(format!("{}: output differs between runs", c.name));
        }
        if first.0 != c.code {
            problems.push(format!("{}: exit status {} (expected {})", c.name, first.0, c.code));
        }
        let mut files = vec![(c.name.to_string(), &first.1)];
        if let Some(w) = &first.2 {
            files.push((format!("{}.file", c.name), w));
        }
        for (name, bytes) in files {
            count += 1;
            let path = dir.join(&name);
            if update {
                fs::write(&path, bytes).unwrap();
            } else {
                match fs::read(&path) {
                    Ok(expected) if &expected == bytes => {}
                    Ok(_) => problems.push(format!("{name}: differs from golden file")),
                    Err(e) => problems.push(format!("{name}: {e}")),
                }
            }
        }
    }
    if problems.is_empty() {
        Ok(count)
    } else {
        Err(problems.join("; "))
    }
}
