use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use dvalue::game::{expand_bits, BooleanGame, MatrixGame, DEFAULT_CAP};
use dvalue::horn::{build_clauses, build_semantic_game, dump_clauses, PayoffClass, DEFAULT_HORN_CAP};
use dvalue::logic::formula_size;
use dvalue::oracle::{check_all, size_table};
use dvalue::rational::{parse_rational, rat, to_canonical, Rational};
use dvalue::reduction::reduce;
use dvalue::reduction::verify::{verify_reduction, Mode, VerifyOptions};
use dvalue::solver::{dedupe_bits, dvalue as decide, solve_zero_sum};
use dvalue::turing::{parse_word, run, Symbol, TMachine};
use dvalue::value_game::{build_value_game, Variant};
use dvalue::{Error, Result};

#[derive(Parser)]
#[command(name = "dvalue", version, about = "Exact values of Boolean games and the acceptance reduction")]
struct Cli {
    /// Largest normal-form expansion (cells) a command may build.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP as u64)]
    cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exhaustive oracle check of every gadget, plus a size table.
    GadgetCheck {
        #[arg(long, default_value_t = 4)]
        max_width: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a value game for a/b.
    MakeValueGame {
        a: u64,
        b: u64,
        #[arg(long, default_value = "calibrated")]
        variant: Variant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves a Boolean game or a matrix game file exactly.
    Solve { game: PathBuf },
    /// Exit 0 (YES) if the value is at least v, 1 (NO) otherwise.
    Dvalue { game: PathBuf, v: String },
    /// Builds the reduction game and its manifest.
    Compile {
        machine: PathBuf,
        word: String,
        k: u32,
        /// Game file; the manifest goes next to it with a `.manifest.json` suffix.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solves the clause game and compares with the simulator.
    Semantic {
        machine: PathBuf,
        word: String,
        k: u32,
        /// Also write the clause system as JSON lines.
        #[arg(long)]
        clauses: Option<PathBuf>,
    },
    /// Checks the reduction's guards against the procedural decoding.
    VerifyReduction {
        machine: PathBuf,
        word: String,
        k: u32,
        #[arg(long, default_value = "exhaustive")]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Skip solving the fifteen subgames.
        #[arg(long)]
        skip_values: bool,
        /// Negate one guard, e.g. `rq3`, to see the checks fail.
        #[arg(long, hide = true)]
        mutate_guard: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Yes,
    No,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<TMachine> {
    let m = TMachine::from_json(&read(path)?)?;
    m.validate()?;
    Ok(m)
}

fn word(w: &str) -> Result<Vec<Symbol>> {
    parse_word(w)
}

enum AnyGame {
    Boolean(BooleanGame),
    Matrix(MatrixGame),
}

fn load_game(path: &Path) -> Result<AnyGame> {
    let text = read(path)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    if value.get("payoffs").is_some() {
        Ok(AnyGame::Matrix(MatrixGame::from_json(&text)?))
    } else {
        Ok(AnyGame::Boolean(BooleanGame::from_json(&text)?))
    }
}

fn parse_guard(s: &str) -> Result<(PayoffClass, usize)> {
    let split = s.find(|c: char| c.is_ascii_digit()).ok_or_else(|| Error::Parse(format!("bad guard {s:?}")))?;
    let class = PayoffClass::ALL
        .into_iter()
        .find(|c| c.name() == &s[..split])
        .ok_or_else(|| Error::Parse(format!("bad guard class in {s:?}")))?;
    let j = s[split..].parse().map_err(|_| Error::Parse(format!("bad guard arity in {s:?}")))?;
    Ok((class, j))
}

fn run_command(cli: Cli) -> Result<Outcome> {
    let cap = cli.cap as u128;
    match cli.command {
        Command::GadgetCheck { max_width, out } => {
            let checks = check_all(max_width)?;
            let mut bad = 0;
            println!("{:<16} {:>5} {:>12} {:>10}", "gadget", "width", "assignments", "mismatches");
            for c in &checks {
                println!("{:<16} {:>5} {:>12} {:>10}", c.kind.name(), c.width, c.assignments, c.mismatches);
                bad += c.mismatches;
            }
            let widths = [1, 2, 4, 8, 16, 32, 64];
            let sizes = size_table(&widths)?;
            println!("\nformula size by width");
            print!("{:<16}", "gadget");
            for w in widths {
                print!(" {w:>8}");
            }
            println!();
            for row in sizes.chunks(widths.len()) {
                print!("{:<16}", row[0].kind.name());
                for r in row {
                    print!(" {:>8}", r.size);
                }
                println!();
            }
            println!("\n{bad} mismatches");
            if let Some(path) = out {
                write(&path, &serde_json::to_string_pretty(&json!({"checks": checks, "sizes": sizes})).unwrap())?;
            }
            Ok(if bad == 0 { Outcome::Yes } else { Outcome::No })
        }
        Command::MakeValueGame { a, b, variant, out } => {
            let g = build_value_game(a, b, variant)?;
            let text = g.to_json();
            eprintln!(
                "{} variables ({} for player one, {} for player two)",
                g.universe.len(),
                g.player1.len(),
                g.player2.len()
            );
            match out {
                Some(path) => write(&path, &text)?,
                None => println!("{text}"),
            }
            Ok(Outcome::Yes)
        }
        Command::Solve { game } => {
            let res = match load_game(&game)? {
                AnyGame::Matrix(m) => solve_zero_sum(&m)?,
                AnyGame::Boolean(g) => {
                    let bits = expand_bits(&g, cap)?;
                    solve_zero_sum(&dedupe_bits(&bits))?
                }
            };
            println!("{}", res.to_json());
            Ok(Outcome::Yes)
        }
        Command::Dvalue { game, v } => {
            let v = parse_rational(&v)?;
            let yes = match load_game(&game)? {
                AnyGame::Matrix(m) => solve_zero_sum(&m)?.value >= v,
                AnyGame::Boolean(g) => decide(&g, &v, cap)?,
            };
            println!("{}", if yes { "YES" } else { "NO" });
            Ok(if yes { Outcome::Yes } else { Outcome::No })
        }
        Command::Compile { machine, word: w, k, out } => {
            let m = load_machine(&machine)?;
            let red = reduce(&m, &word(&w)?, k)?;
            let size = formula_size(&red.game.goal);
            println!(
                "{} variables ({} player one, {} player two), goal size {size}, {} guards",
                red.game.universe.len(),
                red.game.player1.len(),
                red.game.player2.len(),
                red.manifest.guards.len()
            );
            match out {
                Some(path) => {
                    write(&path, &red.game.to_json())?;
                    let manifest = path.with_extension("manifest.json");
                    write(&manifest, &red.manifest.to_json())?;
                    println!("wrote {} and {}", path.display(), manifest.display());
                }
                None => println!("{}", red.manifest.to_json()),
            }
            Ok(Outcome::Yes)
        }
        Command::Semantic { machine, word: w, k, clauses } => {
            let m = load_machine(&machine)?;
            let w = word(&w)?;
            let horn_cap = cap.max(DEFAULT_HORN_CAP);
            if let Some(path) = clauses {
                let s = build_clauses(&m, &w, k, horn_cap)?;
                write(&path, &dump_clauses(&s, &m.states))?;
            }
            let g = build_semantic_game(&m, &w, k, horn_cap)?;
            let value: Rational = solve_zero_sum(&g)?.value;
            let accepts = value >= rat(1, 2);
            let simulated = run(&m, &w, k)?.accepted;
            println!("value {}", to_canonical(&value));
            println!("game verdict: {}", if accepts { "accepts" } else { "rejects" });
            println!("simulator: {}", if simulated { "accepts" } else { "rejects" });
            if accepts == simulated {
                Ok(Outcome::Yes)
            } else {
                println!("MISMATCH");
                Ok(Outcome::No)
            }
        }
        Command::VerifyReduction {
            machine,
            word: w,
            k,
            mode,
            seed,
            samples,
            skip_values,
            mutate_guard,
            out,
        } => {
            let m = load_machine(&machine)?;
            if mode == Mode::Sampled && seed.is_none() {
                return Err(Error::Parse("--mode sampled requires --seed".into()));
            }
            let mut opts = VerifyOptions::exhaustive(k);
            opts.mode = mode;
            opts.seed = seed;
            opts.samples = if mode == Mode::Sampled { samples } else { 0 };
            opts.cap = cap.max(1 << 26);
            opts.values = !skip_values;
            opts.mutate = mutate_guard.as_deref().map(parse_guard).transpose()?;
            let report = verify_reduction(&m, &word(&w)?, &opts)?;
            let text = report.to_json();
            match out {
                Some(path) => write(&path, &text)?,
                None => println!("{text}"),
            }
            for s in &report.suites {
                eprintln!(
                    "{:<34} {:>10} checked {:>8} failures",
                    s.name, s.checked, s.failures
                );
            }
            let exact = report.conditional_values.iter().filter(|v| v.exact).count();
            eprintln!("conditional values: {exact}/{} exact", report.conditional_values.len());
            eprintln!("{}", if report.passed { "PASSED" } else { "FAILED" });
            Ok(if report.passed { Outcome::Yes } else { Outcome::No })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run_command(cli) {
        Ok(Outcome::Yes) => ExitCode::SUCCESS,
        Ok(Outcome::No) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_names_parse() {
        assert_eq!(parse_guard("rq3").unwrap(), (PayoffClass::Rq, 3));
        assert_eq!(parse_guard("neq0").unwrap(), (PayoffClass::Neq, 0));
        assert!(parse_guard("xx1").is_err());
        assert!(parse_guard("rpi").is_err());
    }
}
