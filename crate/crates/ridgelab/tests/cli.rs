//! Black-box tests of the installed binary: exit codes, messages, and
//! byte-level determinism of everything it writes.

use std::path::Path;
use std::process::{Command, Output};

fn ridgelab<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_ridgelab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

const CSV_HEADER: &str =
    "algorithm,iz_init,m,n,lambda,sigma_min,trial,iteration,err_beta,err_normal,err_weighted,noop_count,wall_ns";

#[test]
fn help_and_version_exit_zero() {
    let help = ridgelab(["--help"]);
    assert_eq!(code(&help), 0);
    assert!(stdout(&help).contains("ridgelab"));
    assert!(stdout(&help).contains("bench"));

    let version = ridgelab(["--version"]);
    assert_eq!(code(&version), 0);

    let sub_help = ridgelab(["solve", "--help"]);
    assert_eq!(code(&sub_help), 0);
    assert!(stdout(&sub_help).contains("--trace-every"));
}

#[test]
fn bad_flags_exit_two() {
    let unknown_flag = ridgelab(["solve", "--frobnicate"]);
    assert_eq!(code(&unknown_flag), 2);

    let unknown_command = ridgelab(["dance"]);
    assert_eq!(code(&unknown_command), 2);

    let missing_source = ridgelab(["solve", "--alg", "rk-ridge"]);
    assert_eq!(code(&missing_source), 2);
    assert!(stderr(&missing_source).contains("provide --in DIR or all of"));

    let bad_alg = ridgelab([
        "solve", "--m", "6", "--n", "3", "--sigma-min", "0.5", "--lambda", "0.1", "--alg", "sgd",
    ]);
    assert_eq!(code(&bad_alg), 2);
    assert!(stderr(&bad_alg).contains("unknown algorithm 'sgd'"));
}

#[test]
fn sigma_min_validation_reports_the_range() {
    let out = ridgelab([
        "solve", "--m", "5", "--n", "3", "--sigma-min", "1.5", "--lambda", "0.1", "--alg",
        "rk-ridge",
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("sigma-min must be in (0,1]"));

    let zero = ridgelab([
        "gen", "--m", "5", "--n", "3", "--sigma-min", "0", "--lambda", "0.1", "--out", "/tmp/never",
    ]);
    assert_eq!(code(&zero), 2);
    assert!(stderr(&zero).contains("sigma-min must be in (0,1]"));
}

#[test]
fn iz_demands_an_init_choice() {
    let missing = ridgelab([
        "solve", "--m", "6", "--n", "3", "--sigma-min", "0.5", "--lambda", "0.1", "--alg", "iz",
    ]);
    assert_eq!(code(&missing), 2);
    assert!(stderr(&missing).contains("iz requires --iz-init"));

    let misapplied = ridgelab([
        "solve", "--m", "6", "--n", "3", "--sigma-min", "0.5", "--lambda", "0.1", "--alg", "rk",
        "--iz-init", "iz0",
    ]);
    assert_eq!(code(&misapplied), 2);
    assert!(stderr(&misapplied).contains("--iz-init applies only to iz"));

    let bad_init = ridgelab([
        "solve", "--m", "6", "--n", "3", "--sigma-min", "0.5", "--lambda", "0.1", "--alg", "iz",
        "--iz-init", "warm",
    ]);
    assert_eq!(code(&bad_init), 2);
    assert!(stderr(&bad_init).contains("unknown iz init 'warm'"));
}

#[test]
fn io_failures_exit_one() {
    let missing_dir = ridgelab(["solve", "--in", "/no/such/instance", "--alg", "rk-ridge"]);
    assert_eq!(code(&missing_dir), 1);

    let missing_config = ridgelab(["bench", "--config", "/no/such/grid.conf"]);
    assert_eq!(code(&missing_config), 1);
    assert!(stderr(&missing_config).contains("cannot read"));

    let bad_out = ridgelab([
        "solve", "--m", "6", "--n", "3", "--sigma-min", "0.5", "--lambda", "0.1", "--alg",
        "rgs-ridge", "--iters", "10", "--trace-every", "10", "--csv", "/no/such/dir/out.csv",
    ]);
    assert_eq!(code(&bad_out), 1);
    assert!(stderr(&bad_out).contains("cannot create"));
}

#[test]
fn gen_writes_a_complete_loadable_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let out = ridgelab([
        "gen",
        "--m",
        "12",
        "--n",
        "5",
        "--sigma-min",
        "0.3",
        "--lambda",
        "0.05",
        "--seed",
        "3",
        "--out",
        inst.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains(&format!("instance 12x5 written to {}", inst.display())));
    assert!(text.contains("spectrum: 0.3 "));
    assert!(text.contains("duality gap:"));
    for file in ["X.mtx", "y.mtx", "beta_true.mtx", "meta.txt"] {
        assert!(inst.join(file).is_file(), "{} missing", file);
    }

    let solve = ridgelab([
        "solve",
        "--in",
        inst.to_str().unwrap(),
        "--alg",
        "rgs-ridge",
        "--iters",
        "50",
        "--trace-every",
        "25",
    ]);
    assert_eq!(code(&solve), 0, "stderr: {}", stderr(&solve));
    let csv = stdout(&solve);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 4, "header plus iterations 0, 25, 50");
    assert!(lines[1].starts_with("rgs-ridge,,12,5,"));
}

#[test]
fn generation_is_deterministic_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let run = ridgelab([
            "gen",
            "--m",
            "9",
            "--n",
            "7",
            "--sigma-min",
            "0.2",
            "--lambda",
            "0.01",
            "--seed",
            "123",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&run), 0);
    }
    for file in ["X.mtx", "y.mtx", "beta_true.mtx", "meta.txt"] {
        let bytes_a = std::fs::read(a.join(file)).unwrap();
        let bytes_b = std::fs::read(b.join(file)).unwrap();
        assert_eq!(bytes_a, bytes_b, "{} differs between runs", file);
    }
}

#[test]
fn solving_a_saved_instance_matches_inline_generation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("inst");
    let gen = ridgelab([
        "gen", "--m", "10", "--n", "4", "--sigma-min", "0.4", "--lambda", "0.02", "--seed", "5",
        "--out", inst.to_str().unwrap(),
    ]);
    assert_eq!(code(&gen), 0);

    let solve_args = ["--alg", "iz", "--iz-init", "izrnd", "--iters", "60", "--trace-every", "20", "--seed", "9"];
    let from_dir = ridgelab(
        ["solve", "--in", inst.to_str().unwrap()]
            .into_iter()
            .chain(solve_args),
    );
    let inline = ridgelab(
        [
            "solve", "--m", "10", "--n", "4", "--sigma-min", "0.4", "--lambda", "0.02",
            "--gen-seed", "5",
        ]
        .into_iter()
        .chain(solve_args),
    );
    assert_eq!(code(&from_dir), 0, "stderr: {}", stderr(&from_dir));
    assert_eq!(code(&inline), 0, "stderr: {}", stderr(&inline));
    assert_eq!(stdout(&from_dir), stdout(&inline));
    assert!(stdout(&from_dir).lines().nth(1).unwrap().starts_with("iz,izrnd,10,4,"));
}

#[test]
fn bench_counts_records_and_reports_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("grid.conf");
    std::fs::write(
        &conf,
        "dims = 10x4\nlambda = 0.05\nsigma_min = 0.5\nalgorithms = rk-ridge, iz:izmix\n\
         iterations = 40\ntrace_every = 20\ntrials = 2\nseed = 9\nmetrics = err_beta\n",
    )
    .unwrap();
    let out = ridgelab(["bench", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let csv = stdout(&out);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len() - 1, 2 * 2 * 3, "trials x algorithms x traces");
    assert!(stderr(&out).starts_with("grid: 1 cells, 2 tasks, 12 records"));

    let invalid = std::fs::read_to_string(&conf).unwrap() + "trials = 3\n";
    std::fs::write(&conf, invalid).unwrap();
    let dup = ridgelab(["bench", "--config", conf.to_str().unwrap()]);
    assert_eq!(code(&dup), 2);
    assert!(stderr(&dup).contains("duplicate key 'trials'"));
}

#[test]
fn rates_prints_factors_and_the_condition_pair() {
    let out = ridgelab([
        "rates", "--m", "8", "--n", "5", "--sigma-min", "0.1", "--lambda", "0.01",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("instance: 8x5, lambda = 0.01, sigma-min = 0.1"));
    for label in ["rk ", "rgs ", "rk-ridge", "rgs-ridge", "naive-rk", "naive-rgs"] {
        assert!(text.contains(label), "missing {} in:\n{}", label, text);
    }
    assert!(text.contains("factor 0."));
    assert!(text.contains("(k-prime norm)"));
    assert!(text.contains("(sigma-prime norm)"));
    assert!(text.contains("regime: over-determined"));
    assert!(text.contains("cond(augmented)"));

    let unregularized = ridgelab([
        "rates", "--m", "8", "--n", "5", "--sigma-min", "0.1", "--lambda", "0",
    ]);
    assert_eq!(code(&unregularized), 0);
    assert!(stdout(&unregularized).contains("iz         requires lambda > 0"));
}

#[test]
fn one_by_one_instance_round_trips() {
    let out = ridgelab([
        "solve", "--m", "1", "--n", "1", "--sigma-min", "1", "--lambda", "0.5", "--alg",
        "rk-ridge", "--iters", "5", "--trace-every", "1",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 7);
}

#[test]
fn verify_passes_in_both_depths() {
    let quick = ridgelab(["verify"]);
    assert_eq!(code(&quick), 0, "stderr: {}", stderr(&quick));
    let text = stdout(&quick);
    assert_eq!(text.matches("PASS").count(), 8);
    assert!(text.contains("8 of 8 checks passed"));
    assert!(!text.contains("crossover"));

    let full = ridgelab(["verify", "--full"]);
    assert_eq!(code(&full), 0, "stderr: {}", stderr(&full));
    let text = stdout(&full);
    assert_eq!(text.matches("PASS").count(), 10);
    assert!(text.contains("10 of 10 checks passed"));
    assert!(text.contains("crossover-tall"));
    assert!(text.contains("crossover-wide"));

    let contradictory = ridgelab(["verify", "--quick", "--full"]);
    assert_eq!(code(&contradictory), 2);
}

#[test]
fn solve_writes_csv_files_byte_identically() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for path in [&a, &b] {
        let out = ridgelab([
            "solve",
            "--m",
            "14",
            "--n",
            "6",
            "--sigma-min",
            "0.25",
            "--lambda",
            "0.05",
            "--alg",
            "naive-rgs",
            "--iters",
            "30",
            "--trace-every",
            "10",
            "--csv",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        assert!(stdout(&out).contains("wrote 4 records to"));
    }
    assert_eq!(
        std::fs::read(&a).unwrap(),
        std::fs::read(&b).unwrap(),
        "repeat runs must serialize identically"
    );
    assert!(csv_rows_are_well_formed(&a));
}

/// Thirteen fields per row, integral noop counter, pinned-zero wall time.
fn csv_rows_are_well_formed(path: &Path) -> bool {
    let text = std::fs::read_to_string(path).unwrap();
    text.lines().nth(1).is_some()
        && text.lines().skip(1).all(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            fields.len() == 13
                && fields[11].chars().all(|c| c.is_ascii_digit())
                && fields[12] == "0"
        })
}
