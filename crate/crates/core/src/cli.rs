//! Command-line surface: verification and computation subcommands with
//! machine-readable reports.

use crate::codim::{closed_form_codim, codim_breakdown, codim_rn, onerow_multiplicity};
use crate::ideals::{
    deduce, minimality_witness, replay_deduction_chains, verify_generators, DeductionStep,
};
use crate::matcore::s_basis;
use crate::pbw::{
    casimir_eigenvalue_closed, casimir_eigenvalue_trace, enveloping_dim, preimage::preimage_rho,
    PBWElem, PbwCtx,
};
use crate::upoly::{format_upoly, is_identity, parse_upoly};
use crate::{rat, Error, Rat, Result};
use clap::{Args, Parser, Subcommand};
use num::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// One named comparison in a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub computed: String,
    pub expected: String,
    pub pass: bool,
}

/// Machine-readable result of one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    format: Format,
    /// Seed for the randomized rank certificates.
    #[arg(long, default_value = "0", global = true)]
    seed: u64,
    /// Worker thread cap (0 keeps the default).
    #[arg(long, default_value = "0", global = true)]
    threads: usize,
}

#[derive(Debug, Parser)]
#[command(
    name = "matident",
    about = "Exact computations with the derivation action on k x k matrices"
)]
struct CliArgs {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Codimensions by exact evaluation rank, against the closed form.
    Codim {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// Restrict to a single cell with this many leading identity slots.
        #[arg(long)]
        r: Option<usize>,
    },
    /// Casimir eigenvalues: closed form against the trace form.
    Eigenvalues {
        #[arg(long)]
        k: usize,
    },
    /// Verify that every unit preimage represents to its unit.
    Preimages {
        #[arg(long)]
        k: usize,
    },
    /// Verify the kernel elements of the representation.
    Kernel {
        #[arg(long)]
        k: usize,
    },
    /// Decide whether a polynomial is an identity.
    IdentityCheck {
        #[arg(long)]
        k: usize,
        #[arg(long, conflicts_with = "file")]
        poly: Option<String>,
        #[arg(long)]
        file: Option<std::path::PathBuf>,
    },
    /// Verify the four generators and the two-variable identity list.
    Generators {
        #[arg(long)]
        k: usize,
    },
    /// Minimality certificates for the generator set.
    Minimality {
        #[arg(long)]
        k: usize,
    },
    /// Replay a deduction script.
    Deduce {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        script: std::path::PathBuf,
    },
    /// Replay the built-in deduction chain families.
    Chains {
        #[arg(long)]
        k: usize,
    },
    /// One-row cocharacter multiplicities with exact degree accounting.
    Cocharacter {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
    },
    /// Stabilized dimension of the represented monomial span.
    Envdim {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        cap: usize,
    },
}

/// Renders a report in the requested format.
pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("serializable"),
        Format::Csv => {
            // The codim sweep uses coordinate columns; other commands use
            // the check name.
            let mut out = String::new();
            let coords = r.command == "codim"
                && r.checks.iter().all(|c| c.name.starts_with("n=") || c.name == "total");
            if coords {
                out.push_str("n,r,computed,expected,pass\n");
                for c in &r.checks {
                    let (n, rr) = if c.name == "total" {
                        (r.params.get("n").cloned().unwrap_or_default(), "*".to_string())
                    } else {
                        let mut n = String::new();
                        let mut rr = String::new();
                        for part in c.name.split(',') {
                            if let Some(v) = part.trim().strip_prefix("n=") {
                                n = v.to_string();
                            }
                            if let Some(v) = part.trim().strip_prefix("r=") {
                                rr = v.to_string();
                            }
                        }
                        (n, rr)
                    };
                    out.push_str(&format!("{n},{rr},{},{},{}\n", c.computed, c.expected, c.pass));
                }
            } else {
                out.push_str("name,computed,expected,pass\n");
                for c in &r.checks {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        c.name.replace(',', ";"),
                        c.computed,
                        c.expected,
                        c.pass
                    ));
                }
            }
            out
        }
        Format::Text => {
            let mut out = String::new();
            out.push_str(&format!("command: {}\n", r.command));
            for (k, v) in &r.params {
                out.push_str(&format!("  {k} = {v}\n"));
            }
            for c in &r.checks {
                out.push_str(&format!(
                    "[{}] {}: {} (expected {})\n",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.computed,
                    c.expected
                ));
            }
            out.push_str(&format!(
                "{} of {} checks passed in {} ms\n",
                r.checks.iter().filter(|c| c.pass).count(),
                r.checks.len(),
                r.elapsed_ms
            ));
            out
        }
    }
}

fn check(name: impl Into<String>, computed: impl ToString, expected: impl ToString) -> Check {
    let computed = computed.to_string();
    let expected = expected.to_string();
    let pass = computed == expected;
    Check { name: name.into(), computed, expected, pass }
}

fn check_flag(name: impl Into<String>, pass: bool) -> Check {
    Check { name: name.into(), computed: pass.to_string(), expected: "true".to_string(), pass }
}

// ---------------------------------------------------------------------------
// Enveloping-algebra expression parser for scripts
// ---------------------------------------------------------------------------

/// Parses sums of scaled factor words like `1/24 * e2,1^4` or
/// `-1 * e2,1 * e1,2`. Factors multiply in application order: the leftmost
/// factor acts first.
pub fn parse_pbw_expr(text: &str, ctx: &PbwCtx) -> Result<PBWElem> {
    let bytes = text.as_bytes();
    let mut pos = 0usize;
    let k = ctx.k();
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
    fn skip(bytes: &[u8], pos: &mut usize) {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
    }
    fn integer(bytes: &[u8], pos: &mut usize) -> Result<u64> {
        skip(bytes, pos);
        let start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == start {
            return Err(Error::Parse { pos: start, msg: "expected an integer".into() });
        }
        std::str::from_utf8(&bytes[start..*pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "integer out of range".into() })
    }
    let mut out = ctx.zero();
    let mut term_sign = Rat::one();
    let mut pending_term = true;
    loop {
        skip(bytes, &mut pos);
        if pos >= bytes.len() {
            if pending_term {
                return Err(err(pos, "expected a term"));
            }
            break;
        }
        pending_term = false;
        let mut coeff = term_sign.clone();
        let mut factors: Vec<PBWElem> = Vec::new();
        let mut term_done = false;
        while !term_done {
            skip(bytes, &mut pos);
            if pos >= bytes.len() {
                break;
            }
            match bytes[pos] {
                b'+' => {
                    pos += 1;
                    term_sign = Rat::one();
                    term_done = true;
                    pending_term = true;
                }
                b'-' if !factors.is_empty() => {
                    pos += 1;
                    term_sign = -Rat::one();
                    term_done = true;
                    pending_term = true;
                }
                b'-' | b'0'..=b'9' => {
                    let neg = bytes[pos] == b'-';
                    if neg {
                        pos += 1;
                    }
                    let nu = integer(bytes, &mut pos)? as i64;
                    skip(bytes, &mut pos);
                    let de = if pos < bytes.len() && bytes[pos] == b'/' {
                        pos += 1;
                        integer(bytes, &mut pos)? as i64
                    } else {
                        1
                    };
                    if de == 0 {
                        return Err(err(pos, "zero denominator"));
                    }
                    let mut c = rat(nu, de);
                    if neg {
                        c = -c;
                    }
                    coeff *= c;
                }
                b'*' => {
                    pos += 1;
                }
                b'e' | b'h' => {
                    let kind = bytes[pos];
                    pos += 1;
                    let start = pos;
                    let first = integer(bytes, &mut pos)?;
                    let base = if kind == b'h' {
                        if first as usize >= k || first == 0 {
                            return Err(err(start, "h index out of range"));
                        }
                        ctx.h(first as usize)?
                    } else {
                        let (i, j) = if pos < bytes.len() && bytes[pos] == b',' {
                            pos += 1;
                            (first, integer(bytes, &mut pos)?)
                        } else if pos - start == 2 {
                            (first / 10, first % 10)
                        } else {
                            return Err(err(start, "matrix unit needs two indices"));
                        };
                        ctx.e(i as usize, j as usize)?
                    };
                    let exp = if pos < bytes.len() && bytes[pos] == b'^' {
                        pos += 1;
                        integer(bytes, &mut pos)? as usize
                    } else {
                        1
                    };
                    factors.push(ctx.power(&base, exp));
                }
                _ => return Err(err(pos, "unexpected character in expression")),
            }
        }
        if factors.is_empty() {
            return Err(err(pos, "empty term"));
        }
        out = out.add(&ctx.op_word(&factors).scale(&coeff));
        if pos >= bytes.len() && !term_done {
            break;
        }
    }
    Ok(out)
}

/// A parsed deduction script: a starting polynomial, steps, and an optional
/// expected final polynomial.
pub struct Script {
    pub start: crate::upoly::UPoly,
    pub steps: Vec<DeductionStep>,
    pub expect: Option<crate::upoly::UPoly>,
}

/// Parses a script: the first content line holds the starting polynomial,
/// followed by `ACT <expr>` and `SUB <coeff> <ref>` lines (`SUB` attaches to
/// the preceding `ACT`; references index the step results, 0 being the
/// start), and optionally `EXPECT <poly>`. Lines starting with `#` are
/// comments.
pub fn parse_script(text: &str, ctx: &PbwCtx) -> Result<Script> {
    let k = ctx.k();
    let mut start = None;
    let mut steps: Vec<DeductionStep> = Vec::new();
    let mut expect = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if start.is_none() {
            start = Some(parse_upoly(line, k)?);
        } else if let Some(rest) = line.strip_prefix("ACT ") {
            steps.push(DeductionStep { exponent: parse_pbw_expr(rest, ctx)?, subtract: vec![] });
        } else if let Some(rest) = line.strip_prefix("SUB ") {
            let mut parts = rest.split_whitespace();
            let coeff_text = parts
                .next()
                .ok_or_else(|| Error::Parse { pos: 0, msg: "SUB needs a coefficient".into() })?;
            let refno: usize = parts.next().and_then(|t| t.parse().ok()).ok_or_else(|| {
                Error::Parse { pos: 0, msg: "SUB needs a result reference".into() }
            })?;
            let coeff = parse_rat(coeff_text)?;
            let step = steps
                .last_mut()
                .ok_or_else(|| Error::Parse { pos: 0, msg: "SUB before any ACT".into() })?;
            step.subtract.push((coeff, refno));
        } else if let Some(rest) = line.strip_prefix("EXPECT ") {
            expect = Some(parse_upoly(rest, k)?);
        } else {
            return Err(Error::Parse { pos: 0, msg: format!("unrecognized line: {line}") });
        }
    }
    let start =
        start.ok_or(Error::Parse { pos: 0, msg: "script has no starting polynomial".into() })?;
    Ok(Script { start, steps, expect })
}

fn parse_rat(text: &str) -> Result<Rat> {
    let (neg, rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text),
    };
    let (nu, de) = match rest.split_once('/') {
        Some((a, b)) => (a, b),
        None => (rest, "1"),
    };
    let nu: i64 =
        nu.parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad rational: {text}") })?;
    let de: i64 =
        de.parse().map_err(|_| Error::Parse { pos: 0, msg: format!("bad rational: {text}") })?;
    if de == 0 {
        return Err(Error::Parse { pos: 0, msg: "zero denominator".into() });
    }
    let r = rat(nu, de);
    Ok(if neg { -r } else { r })
}

// ---------------------------------------------------------------------------
// Command handlers
// ---------------------------------------------------------------------------

fn expected_cell(r: usize, n: usize, k: usize) -> usize {
    if r == n {
        1
    } else if r + 1 == n {
        k * k - 1
    } else {
        k * k
    }
}

fn run_command(cmd: &Cmd, seed: u64) -> Result<(String, BTreeMap<String, String>, Vec<Check>)> {
    let mut params = BTreeMap::new();
    params.insert("seed".to_string(), seed.to_string());
    let mut checks = Vec::new();
    let command;
    match cmd {
        Cmd::Codim { k, n, r } => {
            command = "codim";
            params.insert("k".into(), k.to_string());
            params.insert("n".into(), n.to_string());
            match r {
                Some(r) => {
                    params.insert("r".into(), r.to_string());
                    let c = codim_rn(*r, *n, *k, seed)?;
                    checks.push(check(format!("n={n},r={r}"), c, expected_cell(*r, *n, *k)));
                }
                None => {
                    let (cells, total) = codim_breakdown(*n, *k, seed)?;
                    for (r, c) in cells.iter().enumerate() {
                        checks.push(check(format!("n={n},r={r}"), c, expected_cell(r, *n, *k)));
                    }
                    checks.push(check("total", total, closed_form_codim(*n, *k)));
                }
            }
        }
        Cmd::Eigenvalues { k } => {
            command = "eigenvalues";
            params.insert("k".into(), k.to_string());
            for p in 2..=*k {
                let closed = casimir_eigenvalue_closed(p, *k)?;
                let trace = casimir_eigenvalue_trace(p, *k)?;
                checks.push(check(format!("lambda({p};{k}) closed vs trace"), closed, trace));
            }
        }
        Cmd::Preimages { k } => {
            command = "preimages";
            params.insert("k".into(), k.to_string());
            let ctx = PbwCtx::new(*k)?;
            let mut pairs: Vec<(crate::matcore::BasisIndexM, crate::matcore::BasisIndexM)> =
                Vec::new();
            for a in s_basis(*k)? {
                for b in s_basis(*k)? {
                    pairs.push((a, b));
                }
            }
            pairs.push((crate::matcore::BasisIndexM::G, crate::matcore::BasisIndexM::G));
            let total = pairs.len();
            let mut good = 0usize;
            for (a, b) in pairs {
                let rho = preimage_rho(a, b, &ctx)?;
                if ctx.rep_phi(&rho)? == crate::endoalg::phi_unit(a, b, *k)? {
                    good += 1;
                }
            }
            checks.push(check(
                "preimages representing their units",
                format!("{good}/{total}"),
                format!("{total}/{total}"),
            ));
        }
        Cmd::Kernel { k } => {
            command = "kernel";
            params.insert("k".into(), k.to_string());
            let ctx = PbwCtx::new(*k)?;
            let ks = ctx.kernel_elements()?;
            checks.push(check_flag(
                "combined kernel element represents to zero",
                ctx.in_kernel(&ks.z)?,
            ));
            for (p, zp) in &ks.z_p {
                let rep = ctx.rep_phi(zp)?;
                let traceless_ok = rep.coeffs().keys().all(|&(a, b)| {
                    a == crate::matcore::BasisIndexM::G && b == crate::matcore::BasisIndexM::G
                });
                checks.push(check_flag(
                    format!("centered casimir z_{p} vanishes on the traceless block"),
                    traceless_ok,
                ));
            }
            for (p, zp) in &ks.z_prime {
                checks.push(check_flag(
                    format!("constant-free recombination z'_{p} represents to zero"),
                    ctx.in_kernel(zp)?,
                ));
            }
        }
        Cmd::IdentityCheck { k, poly, file } => {
            command = "identity-check";
            params.insert("k".into(), k.to_string());
            let text = match (poly, file) {
                (Some(p), _) => p.clone(),
                (None, Some(path)) => std::fs::read_to_string(path)
                    .map_err(|e| Error::Parse { pos: 0, msg: format!("cannot read file: {e}") })?,
                (None, None) => {
                    return Err(Error::Parse { pos: 0, msg: "need --poly or --file".into() })
                }
            };
            params.insert("poly".into(), text.trim().to_string());
            let f = parse_upoly(text.trim(), *k)?;
            checks.push(check_flag("polynomial is an identity", is_identity(&f)?));
        }
        Cmd::Generators { k } => {
            command = "generators";
            params.insert("k".into(), k.to_string());
            let rep = verify_generators(*k)?;
            for item in rep.items {
                if item.detail.is_empty() {
                    checks.push(check_flag(item.name, item.pass));
                } else {
                    let n = item.detail.split('/').nth(1).unwrap_or("").to_string();
                    checks.push(Check {
                        name: item.name,
                        computed: item.detail.clone(),
                        expected: format!("{n}/{n}"),
                        pass: item.pass,
                    });
                }
            }
        }
        Cmd::Minimality { k } => {
            command = "minimality";
            params.insert("k".into(), k.to_string());
            let rep = minimality_witness(*k)?;
            for item in rep.items {
                checks.push(check_flag(item.name, item.pass));
            }
        }
        Cmd::Deduce { k, script } => {
            command = "deduce";
            params.insert("k".into(), k.to_string());
            params.insert("script".into(), script.display().to_string());
            let text = std::fs::read_to_string(script)
                .map_err(|e| Error::Parse { pos: 0, msg: format!("cannot read script: {e}") })?;
            let ctx = PbwCtx::new(*k)?;
            let parsed = parse_script(&text, &ctx)?;
            let fin = deduce(&parsed.start, &parsed.steps, &ctx)?;
            match parsed.expect {
                Some(want) => {
                    checks.push(check("final polynomial", format_upoly(&fin), format_upoly(&want)));
                }
                None => checks.push(Check {
                    name: "final polynomial".into(),
                    computed: format_upoly(&fin),
                    expected: "(none given)".into(),
                    pass: true,
                }),
            }
        }
        Cmd::Chains { k } => {
            command = "chains";
            params.insert("k".into(), k.to_string());
            let rep = replay_deduction_chains(*k)?;
            for fam in rep.families {
                checks.push(Check {
                    name: fam.name,
                    computed: fam.detail,
                    expected: "all instances".into(),
                    pass: fam.pass,
                });
            }
        }
        Cmd::Cocharacter { k, n } => {
            command = "cocharacter";
            params.insert("k".into(), k.to_string());
            params.insert("n".into(), n.to_string());
            for r in 0..=*n {
                let rec = onerow_multiplicity(r, *n, *k, seed)?;
                let computed = if rec.certified {
                    rec.multiplicity.to_string()
                } else {
                    format!("{} (uncertified)", rec.multiplicity)
                };
                checks.push(check(
                    format!("m[({r}),({})]", n - r),
                    computed,
                    expected_cell(r, *n, *k),
                ));
            }
        }
        Cmd::Envdim { k, cap } => {
            command = "envdim";
            params.insert("k".into(), k.to_string());
            params.insert("cap".into(), cap.to_string());
            let r = enveloping_dim(*k, *cap)?;
            let want = (k * k - 1) * (k * k - 1) + 1;
            checks.push(check("stabilized dimension", r.dim, want));
            checks.push(Check {
                name: "stabilization degree".into(),
                computed: r.stabilized_at.to_string(),
                expected: format!("<= {}", 2 * (k - 1) + 2),
                pass: r.stabilized_at <= 2 * (k - 1) + 2,
            });
        }
    }
    Ok((command.to_string(), params, checks))
}

/// Outcome of one invocation: the report (when the command ran), the chosen
/// format, diagnostics for the error stream, and the process exit code.
pub struct ExecOutcome {
    pub report: Option<Report>,
    pub format: Format,
    pub diagnostics: String,
    pub exit_code: i32,
}

/// Parses the argument vector and runs the mapped operation. Exit code 0
/// when every check passes, 1 on a failed check, 2 on usage errors.
pub fn execute<I, T>(argv: I) -> ExecOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args = match CliArgs::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            return ExecOutcome {
                report: None,
                format: Format::Text,
                diagnostics: e.to_string(),
                exit_code: 2,
            }
        }
    };
    if args.common.threads > 0 {
        // Re-initializing the global pool is rejected on repeated calls;
        // that is fine here.
        let _ =
            rayon::ThreadPoolBuilder::new().num_threads(args.common.threads).build_global();
    }
    let start = Instant::now();
    match run_command(&args.cmd, args.common.seed) {
        Ok((command, mut params, checks)) => {
            if args.common.threads > 0 {
                params.insert("threads".into(), args.common.threads.to_string());
            }
            let report =
                Report { command, params, checks, elapsed_ms: start.elapsed().as_millis() as u64 };
            let exit_code = if report.all_pass() { 0 } else { 1 };
            ExecOutcome {
                report: Some(report),
                format: args.common.format,
                diagnostics: String::new(),
                exit_code,
            }
        }
        Err(e) => ExecOutcome {
            report: None,
            format: args.common.format,
            diagnostics: format!("error: {e}"),
            exit_code: 2,
        },
    }
}

/// Wrapper used by the binary: prints the report and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let outcome = execute(argv);
    if let Some(report) = &outcome.report {
        println!("{}", emit_report(report, outcome.format));
    }
    if !outcome.diagnostics.is_empty() {
        eprintln!("{}", outcome.diagnostics);
    }
    outcome.exit_code
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(s: &str) -> Vec<String> {
        s.split_whitespace().map(|t| t.to_string()).collect()
    }

    #[test]
    fn codim_command() {
        let out = execute(args("matident codim --k 2 --n 3"));
        assert_eq!(out.exit_code, 0);
        let rep = out.report.unwrap();
        let total = rep.checks.iter().find(|c| c.name == "total").unwrap();
        assert_eq!(total.computed, "244");
        assert_eq!(total.expected, "244");
    }

    #[test]
    fn eigenvalues_command() {
        let out = execute(args("matident eigenvalues --k 4"));
        assert_eq!(out.exit_code, 0);
        let rep = out.report.unwrap();
        let values: Vec<&str> = rep.checks.iter().map(|c| c.computed.as_str()).collect();
        assert_eq!(values, vec!["8", "16", "72"]);
    }

    #[test]
    fn identity_check_exit_codes() {
        let ok = vec![
            "matident".to_string(),
            "identity-check".into(),
            "--k".into(),
            "3".into(),
            "--poly".into(),
            "x1^[e12|e12] x2^[e12|e31]".into(),
        ];
        assert_eq!(execute(ok).exit_code, 0);
        let fail = vec![
            "matident".to_string(),
            "identity-check".into(),
            "--k".into(),
            "3".into(),
            "--poly".into(),
            "x1^[g|g]".into(),
        ];
        assert_eq!(execute(fail).exit_code, 1);
        assert_eq!(execute(args("matident identity-check --k 3")).exit_code, 2);
    }

    #[test]
    fn usage_error_is_exit_2() {
        let out = execute(args("matident codim --n 3"));
        assert_eq!(out.exit_code, 2);
        assert!(!out.diagnostics.is_empty());
    }

    #[test]
    fn report_round_trip() {
        let out = execute(args("matident eigenvalues --k 3 --format json"));
        let rep = out.report.unwrap();
        let json = emit_report(&rep, Format::Json);
        let back: Report = serde_json::from_str(&json).unwrap();
        assert_eq!(back, rep);
    }

    #[test]
    fn csv_and_empty_reports() {
        let out = execute(args("matident codim --k 2 --n 2 --format csv"));
        let rep = out.report.unwrap();
        let csv = emit_report(&rep, Format::Csv);
        assert_eq!(csv.lines().next().unwrap(), "n,r,computed,expected,pass");
        assert!(csv.lines().count() >= 4);
        let empty = Report {
            command: "eigenvalues".into(),
            params: BTreeMap::new(),
            checks: vec![],
            elapsed_ms: 0,
        };
        let json = emit_report(&empty, Format::Json);
        let back: Report = serde_json::from_str(&json).unwrap();
        assert!(back.checks.is_empty());
        let text = emit_report(&empty, Format::Text);
        assert!(text.contains("0 of 0 checks"));
    }

    #[test]
    fn pbw_expr_parser() {
        let ctx = PbwCtx::new(3).unwrap();
        let e = parse_pbw_expr("1/24 * e2,1^4", &ctx).unwrap();
        assert_eq!(e, ctx.power(&ctx.e(2, 1).unwrap(), 4).scale(&rat(1, 24)));
        // application-order products: the leftmost factor acts first
        let e = parse_pbw_expr("e2,1 * e1,3", &ctx).unwrap();
        assert_eq!(e, ctx.op_word(&[ctx.e(2, 1).unwrap(), ctx.e(1, 3).unwrap()]));
        let e = parse_pbw_expr("e12 + h1 - 2 * e2,1", &ctx).unwrap();
        let want = ctx
            .e(1, 2)
            .unwrap()
            .add(&ctx.h(1).unwrap())
            .sub(&ctx.e(2, 1).unwrap().scale(&rat(2, 1)));
        assert_eq!(e, want);
        assert!(parse_pbw_expr("q", &ctx).is_err());
        assert!(parse_pbw_expr("e12 +", &ctx).is_err());
        assert!(parse_pbw_expr("", &ctx).is_err());
    }

    #[test]
    fn script_round() {
        let ctx = PbwCtx::new(3).unwrap();
        let script = "# flip the repeated unit exponent\n\
                      x1^[e12|e21] x2^[e12|e21]\n\
                      ACT 1/24 * e1,2^4\n\
                      EXPECT x1^[e12|e12] x2^[e12|e12]\n";
        let parsed = parse_script(script, &ctx).unwrap();
        let fin = deduce(&parsed.start, &parsed.steps, &ctx).unwrap();
        assert_eq!(fin, parsed.expect.unwrap());
    }
}
