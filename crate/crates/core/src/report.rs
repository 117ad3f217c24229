//! Command implementations behind the `pauli-dfs` binary and their
//! serializable reports.

use std::fmt::Write as _;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{self, ProbeReport, ScanReport};
use crate::dense::{check_dense, Ket, DEFAULT_DENSE_LIMIT};
use crate::dfs::{self, PhaseClass, RESIDUAL_PASS_TOL};
use crate::error::{DfsError, Result};
use crate::pauli::PauliElement;
use crate::subgroup::{phase_label, PauliSubgroup, Reducibility, DEFAULT_ORDER_CAP};

pub const SCHEMA_VERSION: u32 = 1;
/// Draws per side in the order-8 genericity probe.
pub const PROBE_DRAWS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub trials: usize,
    pub seed: u64,
    pub dense_limit: usize,
    pub require_dfs: bool,
    /// Wall-clock timing makes reports non-reproducible, so it is opt-in.
    pub timing: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            trials: 32,
            seed: 0,
            dense_limit: DEFAULT_DENSE_LIMIT,
            require_dfs: false,
            timing: false,
        }
    }
}

/// Process exit status for an error.
pub fn exit_code(err: &DfsError) -> i32 {
    match err {
        DfsError::NonAbelian => 2,
        DfsError::DegenerateKraus { .. } => 3,
        _ => 1,
    }
}

pub const PRESETS: [&str; 5] = ["qz", "qx", "q4", "q2z", "q8"];

/// Generator lists of the named example subgroups.
pub fn preset_generators(name: &str) -> Result<Vec<&'static str>> {
    Ok(match name {
        "qz" => vec!["ZI", "IZ"],
        "qx" => vec!["XXII", "IIXX"],
        "q4" => vec!["XXXX", "YYYY"],
        "q2z" => vec!["ZZII", "ZIZI", "ZIIZ", "IZZI", "IZIZ", "IIZZ"],
        "q8" => vec!["XXI", "IZZ"],
        other => {
            return Err(DfsError::Domain(format!(
                "unknown preset {other:?}; expected one of {}",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Parses generator arguments; each argument may hold several strings
/// separated by commas. All strings must have the qubit count of the first.
pub fn parse_generators<S: AsRef<str>>(args: &[S]) -> Result<Vec<PauliElement>> {
    let texts: Vec<&str> = args
        .iter()
        .flat_map(|a| a.as_ref().split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if texts.is_empty() {
        return Err(DfsError::Domain("no generators given".into()));
    }
    let mut out: Vec<PauliElement> = Vec::with_capacity(texts.len());
    for (i, text) in texts.iter().enumerate() {
        let expected = out.first().map(PauliElement::n_qubits);
        let p = PauliElement::parse(text, expected).map_err(|e| match e {
            DfsError::Parse { position, message } => DfsError::Parse {
                position,
                message: format!("generator {} {text:?}: {message}", i + 1),
            },
            other => other,
        })?;
        out.push(p);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubgroupSummary {
    pub n_qubits: usize,
    pub generators: Vec<String>,
    /// Independent generators the character labels are built on (Abelian only).
    pub independent_generators: Option<Vec<String>>,
    pub elements: Vec<String>,
    pub order: usize,
    pub is_abelian: bool,
    pub contains_minus_identity: bool,
    pub contains_imaginary_identity: bool,
    pub phase_class: Option<PhaseClass>,
    /// `Σ |tr G|²` over the natural representation.
    pub reducibility_sum: f64,
    pub reducibility: Reducibility,
}

impl SubgroupSummary {
    fn new(group: &PauliSubgroup, dense_limit: usize) -> Result<Self> {
        let (reducibility_sum, reducibility) = group.reducibility_sum(dense_limit)?;
        Ok(SubgroupSummary {
            n_qubits: group.n_qubits(),
            generators: group.generators().iter().map(ToString::to_string).collect(),
            independent_generators: group
                .independent_generators()
                .map(|g| g.iter().map(ToString::to_string).collect()),
            elements: group.elements().iter().map(ToString::to_string).collect(),
            order: group.order(),
            is_abelian: group.is_abelian(),
            contains_minus_identity: group.contains_minus_identity(),
            contains_imaginary_identity: group.contains_imaginary_identity(),
            phase_class: group.is_abelian().then(|| PhaseClass::of(group)),
            reducibility_sum,
            reducibility,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationSummary {
    pub trials: usize,
    pub seed: u64,
    pub max_residual: f64,
    /// Largest gap between the observed eigenvalue and `Σ a_n χ(G_n)`.
    pub max_prediction_error: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CharacterEntry {
    pub label: usize,
    /// Values on the independent generators.
    pub generator_values: Vec<String>,
    /// `(element, value)` in canonical element order.
    pub values: Vec<(String, String)>,
    pub supported: bool,
    pub multiplicity: u128,
    /// Orthonormal basis as `[re, im]` amplitudes.
    pub basis: Vec<Vec<[f64; 2]>>,
    pub verification: Option<VerificationSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionCheck {
    pub phase_class: PhaseClass,
    pub formula: u128,
    pub supported_characters: usize,
    /// Every supported character has the closed-form multiplicity and every
    /// other character has none.
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchSummary {
    pub generators_searched: Vec<String>,
    pub joint_eigenspaces: usize,
    pub total_dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantSubspace {
    pub label: String,
    pub kets: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonGenericSummary {
    pub code: Vec<String>,
    pub subspaces: Vec<InvariantSubspace>,
    pub subspace_leak: f64,
    pub probe: ProbeReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub command: String,
    pub trials: usize,
    pub seed: u64,
    pub subgroup: SubgroupSummary,
    /// Sorted by label; empty for non-Abelian subgroups.
    pub characters: Vec<CharacterEntry>,
    pub dimension_check: Option<DimensionCheck>,
    pub nonabelian_search: Option<SearchSummary>,
    pub non_generic: Option<NonGenericSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl AnalysisReport {
    /// False when any numeric self-check in the report failed.
    pub fn numeric_ok(&self) -> bool {
        let chars_ok = self
            .characters
            .iter()
            .all(|c| c.basis.len() as u128 == c.multiplicity && c.verification.as_ref().is_none_or(|v| v.passed));
        let dims_ok = self.dimension_check.as_ref().is_none_or(|d| d.matches);
        let search_ok = self.nonabelian_search.as_ref().is_none_or(|s| s.joint_eigenspaces == 0);
        let ng_ok = self
            .non_generic
            .as_ref()
            .is_none_or(|n| n.subspace_leak < 1e-12 && n.probe.constrained_failures == 0);
        chars_ok && dims_ok && search_ok && ng_ok
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.subgroup;
        let _ = writeln!(out, "{}", self.command);
        let _ = writeln!(out, "qubits: {}", s.n_qubits);
        let _ = writeln!(out, "generators: {}", s.generators.join(" "));
        let _ = writeln!(out, "order: {}", s.order);
        let _ = writeln!(out, "elements: {}", s.elements.join(" "));
        let _ = writeln!(
            out,
            "abelian: {}  -I: {}  iI: {}",
            s.is_abelian, s.contains_minus_identity, s.contains_imaginary_identity
        );
        let _ = writeln!(
            out,
            "natural representation: {:?}, sum |tr G|^2 = {}",
            s.reducibility,
            fmt_real(s.reducibility_sum)
        );
        if let Some(ind) = &s.independent_generators {
            let _ = writeln!(out, "independent generators: {}", ind.join(" "));
        }
        for c in &self.characters {
            let _ = writeln!(
                out,
                "\nGamma^{}  generator values [{}]  multiplicity {}{}",
                c.label,
                c.generator_values.join(", "),
                c.multiplicity,
                if c.supported { "" } else { " (unsupported)" }
            );
            let vals: Vec<String> = c.values.iter().map(|(e, v)| format!("{e}:{v}")).collect();
            let _ = writeln!(out, "  values: {}", vals.join(" "));
            for (i, v) in c.basis.iter().enumerate() {
                let _ = writeln!(out, "  psi_{} = {}", i + 1, fmt_ket(v));
            }
            if let Some(v) = &c.verification {
                let _ = writeln!(
                    out,
                    "  verify: {} trials, max residual {:e}, max eigenvalue error {:e}: {}",
                    v.trials,
                    v.max_residual,
                    v.max_prediction_error,
                    pass_word(v.passed)
                );
            }
        }
        if let Some(d) = &self.dimension_check {
            let _ = writeln!(
                out,
                "\nclosed form ({}): {} for {} supported characters: {}",
                d.phase_class,
                d.formula,
                d.supported_characters,
                pass_word(d.matches)
            );
        }
        if let Some(search) = &self.nonabelian_search {
            let _ = writeln!(
                out,
                "\nnon-Abelian: joint eigenspaces of [{}]: {} (total dimension {})",
                search.generators_searched.join(", "),
                search.joint_eigenspaces,
                search.total_dimension
            );
        }
        if let Some(ng) = &self.non_generic {
            let _ = writeln!(out, "\ncode: {}", ng.code.join(" "));
            for v in &ng.subspaces {
                let _ = writeln!(out, "  {} = span{{{}}}", v.label, v.kets.join(", "));
            }
            let _ = writeln!(out, "  invariance leak: {:e}", ng.subspace_leak);
            let p = &ng.probe;
            let _ = writeln!(
                out,
                "  generic channels violating the code: {}/{} (smallest residual {:e})",
                p.unconstrained_failures, p.unconstrained_draws, p.min_unconstrained_residual
            );
            let _ = writeln!(
                out,
                "  constrained channels violating the code: {}/{} (largest residual {:e}, normalization error {:e})",
                p.constrained_failures,
                p.constrained_draws,
                p.max_constrained_residual,
                p.max_constrained_normalization_error
            );
        }
        if let Some(t) = &self.timing {
            let _ = writeln!(out, "\ntime: {:.3} ms", t.total_ms);
        }
        out
    }
}

fn pass_word(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// `x` to 12 significant digits, trailing zeros trimmed.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        format!("{x:.11e}")
    }
}

pub fn fmt_complex(z: Complex64) -> String {
    const EPS: f64 = 1e-14;
    match (z.re.abs() > EPS, z.im.abs() > EPS) {
        (_, false) => fmt_real(z.re),
        (false, true) => format!("{}i", fmt_real(z.im)),
        (true, true) => {
            let sign = if z.im < 0.0 { '-' } else { '+' };
            format!("({}{}{}i)", fmt_real(z.re), sign, fmt_real(z.im.abs()))
        }
    }
}

pub fn ket_label(index: usize, n_qubits: usize) -> String {
    format!("|{index:0n_qubits$b}>")
}

/// Nonzero amplitudes as `a|b> + ...`.
pub fn fmt_ket(amplitudes: &[[f64; 2]]) -> String {
    let n = amplitudes.len().max(2).trailing_zeros() as usize;
    let terms: Vec<String> = amplitudes
        .iter()
        .enumerate()
        .filter(|(_, a)| a[0].hypot(a[1]) > 1e-14)
        .map(|(i, a)| format!("{}{}", fmt_complex(Complex64::new(a[0], a[1])), ket_label(i, n)))
        .collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn build_group(gens: &[PauliElement]) -> Result<PauliSubgroup> {
    let n = gens.first().map_or(1, PauliElement::n_qubits);
    PauliSubgroup::closure_on(n, gens, DEFAULT_ORDER_CAP)
}

/// Closure, characters, projector multiplicities, bases and their
/// verification; for non-Abelian input, the joint-eigenspace search.
pub fn cmd_analyze<S: AsRef<str>>(generators: &[S], opts: &Options) -> Result<AnalysisReport> {
    let gens = parse_generators(generators)?;
    analyze_elements(&gens, "analyze", opts)
}

fn analyze_elements(gens: &[PauliElement], command: &str, opts: &Options) -> Result<AnalysisReport> {
    let start = Instant::now();
    let group = build_group(gens)?;
    check_dense(group.n_qubits(), opts.dense_limit)?;
    let subgroup = SubgroupSummary::new(&group, opts.dense_limit)?;

    let mut characters = Vec::new();
    let mut dimension_check = None;
    let mut nonabelian_search = None;
    if group.is_abelian() {
        let class = PhaseClass::of(&group);
        for ch in group.characters()? {
            let basis = dfs::dfs_basis(&group, &ch, opts.dense_limit)?;
            let verification = (!basis.vectors.is_empty()).then(|| {
                let seed = channel::trial_seed(opts.seed, ch.label());
                let v = dfs::verify_dfs(&group, &basis, opts.trials, seed);
                VerificationSummary {
                    trials: v.trials.len(),
                    seed,
                    max_residual: v.max_residual,
                    max_prediction_error: v.trials.iter().filter_map(|t| t.prediction_error).fold(0.0, f64::max),
                    passed: v.passed,
                }
            });
            let summary = ch.summary(&group);
            characters.push(CharacterEntry {
                label: ch.label(),
                generator_values: ch
                    .generator_values()
                    .iter()
                    .map(|&k| phase_label(k).to_string())
                    .collect(),
                values: summary.values,
                supported: class.supports(&group, &ch),
                multiplicity: basis.multiplicity,
                basis: basis.vectors.iter().map(dfs::ket_to_pairs).collect(),
                verification,
            });
        }
        characters.sort_by_key(|c| c.label);
        let formula = dfs::dimension_formula(group.n_qubits(), group.order(), class)?;
        let supported = characters.iter().filter(|c| c.supported).count();
        let matches = characters
            .iter()
            .all(|c| c.multiplicity == if c.supported { formula } else { 0 });
        dimension_check = Some(DimensionCheck {
            phase_class: class,
            formula,
            supported_characters: supported,
            matches,
        });
    } else {
        if opts.require_dfs {
            return Err(DfsError::NonAbelian);
        }
        let found = dfs::nonabelian_one_dim_search(&group, opts.dense_limit)?;
        let mut seen = std::collections::HashSet::new();
        nonabelian_search = Some(SearchSummary {
            generators_searched: group
                .generators()
                .iter()
                .filter(|g| seen.insert((*g).clone()))
                .map(ToString::to_string)
                .collect(),
            joint_eigenspaces: found.spaces.len(),
            total_dimension: found.total_dimension(),
        });
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        command: command.to_string(),
        trials: opts.trials,
        seed: opts.seed,
        subgroup,
        characters,
        dimension_check,
        nonabelian_search,
        non_generic: None,
        timing: opts.timing.then(|| Timing {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
    })
}

/// [`cmd_analyze`] on a named example; `q8` adds the invariant-subspace
/// decomposition and the constrained-channel probe.
pub fn cmd_preset(name: &str, opts: &Options) -> Result<AnalysisReport> {
    let start = Instant::now();
    let gens = parse_generators(&preset_generators(name)?)?;
    let mut report = analyze_elements(&gens, &format!("preset {name}"), opts)?;
    if name == "q8" {
        let probe = channel::q8_genericity_probe(opts.seed, PROBE_DRAWS)?;
        report.non_generic = Some(NonGenericSummary {
            code: channel::Q8_CODE.iter().map(|&i| ket_label(i, 3)).collect(),
            subspaces: channel::Q8_SUBSPACES
                .iter()
                .enumerate()
                .map(|(i, pair)| InvariantSubspace {
                    label: format!("V{}", i + 1),
                    kets: pair.iter().map(|&b| ket_label(b, 3)).collect(),
                })
                .collect(),
            subspace_leak: probe.subspace_leak,
            probe,
        });
    }
    if let Some(t) = report.timing.as_mut() {
        t.total_ms = start.elapsed().as_secs_f64() * 1e3;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelReport {
    pub schema_version: u32,
    pub command: String,
    pub seed: u64,
    pub subgroup: SubgroupSummary,
    pub state_spec: String,
    /// Every trial kept purity 1 to within the verification tolerance.
    pub purity_preserved: bool,
    pub scan: ScanReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl ChannelReport {
    pub fn numeric_ok(&self) -> bool {
        self.scan.max_trace_error < 1e-9
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.scan;
        let _ = writeln!(out, "{}", self.command);
        let _ = writeln!(out, "generators: {}", self.subgroup.generators.join(" "));
        let _ = writeln!(out, "order: {}", self.subgroup.order);
        let _ = writeln!(out, "state: {}", fmt_ket(&s.state));
        let _ = writeln!(out, "operators per channel: {}", s.operators_per_channel);
        for t in &s.trials {
            let _ = writeln!(
                out,
                "trial {:>3}: purity {}  fidelity {}",
                t.trial,
                fmt_real(t.purity),
                fmt_real(t.fidelity)
            );
        }
        let _ = writeln!(
            out,
            "purity min {} mean {}; fidelity min {} mean {}; max trace error {:e}",
            fmt_real(s.min_purity),
            fmt_real(s.mean_purity),
            fmt_real(s.min_fidelity),
            fmt_real(s.mean_fidelity),
            s.max_trace_error
        );
        let _ = writeln!(
            out,
            "{}",
            if self.purity_preserved {
                "purity preserved in every trial"
            } else {
                "state decoheres"
            }
        );
        if let Some(t) = &self.timing {
            let _ = writeln!(out, "time: {:.3} ms", t.total_ms);
        }
        out
    }
}

/// Random group-algebra channels applied to a state given in ket notation.
pub fn cmd_channel<S: AsRef<str>>(generators: &[S], state_spec: &str, opts: &Options) -> Result<ChannelReport> {
    let start = Instant::now();
    let gens = parse_generators(generators)?;
    let group = build_group(&gens)?;
    check_dense(group.n_qubits(), opts.dense_limit)?;
    let state = parse_state(state_spec, Some(group.n_qubits()))?;
    let scan = channel::decoherence_scan(&group, &state, opts.trials, opts.seed, opts.dense_limit)?;
    Ok(ChannelReport {
        schema_version: SCHEMA_VERSION,
        command: "channel".into(),
        seed: opts.seed,
        subgroup: SubgroupSummary::new(&group, opts.dense_limit)?,
        state_spec: state_spec.to_string(),
        purity_preserved: scan.min_purity > 1.0 - RESIDUAL_PASS_TOL,
        scan,
        timing: opts.timing.then(|| Timing {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
        }),
    })
}

/// Parses `c1|b1> + c2|b2> - ...` into a normalized ket.
///
/// Coefficients are optional and may be real (`0.5`), imaginary (`0.5i`, `i`)
/// or parenthesized complex (`(0.5-0.5i)`); `*` between coefficient and ket is
/// allowed. Repeated kets add up. Error positions are 0-based.
pub fn parse_state(spec: &str, n_qubits: Option<usize>) -> Result<Ket> {
    let chars: Vec<char> = spec.chars().collect();
    let err = |position: usize, message: &str| DfsError::Parse {
        position,
        message: message.to_string(),
    };
    let mut pos = 0;
    let skip_ws = |pos: &mut usize| {
        while *pos < chars.len() && chars[*pos].is_whitespace() {
            *pos += 1;
        }
    };

    let mut terms: Vec<(Complex64, usize, usize)> = Vec::new();
    let mut width = n_qubits;
    skip_ws(&mut pos);
    if pos == chars.len() {
        return Err(err(0, "empty state"));
    }
    let mut first = true;
    while pos < chars.len() {
        let mut sign = 1.0;
        match chars[pos] {
            '+' => pos += 1,
            '-' => {
                sign = -1.0;
                pos += 1;
            }
            _ if !first => return Err(err(pos, "expected '+' or '-' between terms")),
            _ => {}
        }
        first = false;
        skip_ws(&mut pos);

        let coef_start = pos;
        let coef = if chars.get(pos) == Some(&'(') {
            let close = chars[pos..]
                .iter()
                .position(|&c| c == ')')
                .map(|o| pos + o)
                .ok_or_else(|| err(pos, "unclosed '('"))?;
            let inner: String = chars[pos + 1..close].iter().filter(|c| !c.is_whitespace()).collect();
            pos = close + 1;
            parse_complex(&inner).ok_or_else(|| err(coef_start, "bad complex coefficient"))?
        } else {
            while pos < chars.len() && (chars[pos].is_ascii_digit() || ".eE".contains(chars[pos])) {
                // Exponent signs belong to the number.
                if "eE".contains(chars[pos]) && matches!(chars.get(pos + 1), Some('+') | Some('-')) {
                    pos += 1;
                }
                pos += 1;
            }
            let number: String = chars[coef_start..pos].iter().collect();
            let imaginary = chars.get(pos) == Some(&'i');
            if imaginary {
                pos += 1;
            }
            let magnitude = if number.is_empty() {
                1.0
            } else {
                number.parse::<f64>().map_err(|_| err(coef_start, "bad coefficient"))?
            };
            if imaginary {
                Complex64::new(0.0, magnitude)
            } else {
                Complex64::new(magnitude, 0.0)
            }
        };
        skip_ws(&mut pos);
        if chars.get(pos) == Some(&'*') {
            pos += 1;
            skip_ws(&mut pos);
        }

        if chars.get(pos) != Some(&'|') {
            return Err(err(pos, "expected '|'"));
        }
        pos += 1;
        let bits_start = pos;
        while pos < chars.len() && (chars[pos] == '0' || chars[pos] == '1') {
            pos += 1;
        }
        let bits: String = chars[bits_start..pos].iter().collect();
        if chars.get(pos) != Some(&'>') {
            return Err(err(pos, "expected '0', '1' or '>'"));
        }
        pos += 1;
        if bits.is_empty() {
            return Err(err(bits_start, "empty ket"));
        }
        match width {
            Some(w) if w != bits.len() => {
                return Err(err(bits_start, &format!("expected {w} qubits, found {}", bits.len())))
            }
            _ => width = Some(bits.len()),
        }
        if bits.len() > 63 {
            return Err(err(bits_start, "too many qubits"));
        }
        let index = usize::from_str_radix(&bits, 2).expect("binary digits");
        terms.push((coef * sign, index, coef_start));
        skip_ws(&mut pos);
    }

    let n = width.expect("at least one term");
    check_dense(n, DEFAULT_DENSE_LIMIT.max(n_qubits.unwrap_or(0)))?;
    let mut ket = Ket::zeros(1 << n);
    for (c, i, _) in &terms {
        ket[*i] += c;
    }
    let norm = ket.norm();
    if norm < 1e-12 {
        return Err(err(0, "state has zero norm"));
    }
    Ok(ket / Complex64::new(norm, 0.0))
}

/// `a`, `bi`, `i`, `-i`, `a+bi`, `a-bi`.
fn parse_complex(s: &str) -> Option<Complex64> {
    let imag_part = |t: &str| -> Option<f64> {
        match t {
            "" | "+" => Some(1.0),
            "-" => Some(-1.0),
            _ => t.parse().ok(),
        }
    };
    if let Some(body) = s.strip_suffix('i') {
        // Split at the last sign that is not an exponent sign or leading.
        let split = body
            .char_indices()
            .rev()
            .find(|&(i, c)| (c == '+' || c == '-') && i > 0 && !matches!(&body[i - 1..i], "e" | "E"))
            .map(|(i, _)| i);
        match split {
            Some(i) => Some(Complex64::new(body[..i].parse().ok()?, imag_part(&body[i..])?)),
            None => Some(Complex64::new(0.0, imag_part(body)?)),
        }
    } else {
        Some(Complex64::new(s.parse().ok()?, 0.0))
    }
}
