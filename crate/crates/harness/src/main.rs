use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mudra::efficiency::{is_ex_post_efficient, is_perfect, is_sd_efficient, unanimity_of};
use mudra::fairness::{check_anonymity, check_neutrality, is_sd_envy_free, is_weak_sd_envy_free};
use mudra::strategy::{find_any_group_manipulation, find_group_manipulation, find_manipulation, ManipulationKind};
use mudra::{AssignmentRule, Guards, Permutation, PreferenceProfile, RandomAssignment, Rule};
use mudra_harness::enumerate::enumerate_profiles;
use mudra_harness::io::{load_assignment, load_profile, to_canonical_json};
use mudra_harness::report::{Verdict, VerificationReport};
use mudra_harness::reproduce::{reproduce, CASES};
use mudra_harness::table1::{table1_sweep, Observed, Property, SweepConfig, Table1Report};
use mudra_harness::HarnessError;

#[derive(Parser)]
#[command(name = "mudra", version, about = "Random assignment with multi-unit demand")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit JSON instead of human-readable text.
    #[arg(long, global = true)]
    json: bool,
    /// Cap on every counted enumeration (overrides MUDRA_GUARD).
    #[arg(long, global = true, value_name = "N")]
    guard: Option<u64>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true, value_name = "K")]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a rule's random assignment.
    Compute {
        #[arg(long)]
        rule: Rule,
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        /// Include the eating trace (eating rules only).
        #[arg(long)]
        trace: bool,
    },
    /// Check a property of an assignment or a rule at a profile.
    Check {
        #[arg(long)]
        property: CheckProperty,
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        /// Assignment to check; defaults to the rule's outcome.
        #[arg(long, value_name = "FILE")]
        assignment: Option<PathBuf>,
        #[arg(long)]
        rule: Option<Rule>,
        #[arg(long)]
        allow_unbalanced: bool,
        /// Permutation for anonymity/neutrality as 1-based images, e.g.
        /// `2,1`; all permutations when omitted.
        #[arg(long, value_delimiter = ',')]
        permutation: Option<Vec<usize>>,
    },
    /// Search for a manipulation.
    Manipulate {
        #[arg(long)]
        rule: Rule,
        #[arg(long, value_name = "FILE")]
        profile: PathBuf,
        /// Manipulating agent id.
        #[arg(long, conflicts_with = "coalition")]
        agent: Option<String>,
        /// Coalition agent ids, comma separated.
        #[arg(long, value_delimiter = ',')]
        coalition: Option<Vec<String>>,
        #[arg(long)]
        kind: KindArg,
    },
    /// Reproduce a published example.
    Reproduce {
        /// Case id; lists the cases when omitted.
        case: Option<String>,
    },
    /// Sweep every rule against every property.
    Table1 {
        #[arg(long, default_value_t = 2)]
        agents: usize,
        #[arg(long, default_value_t = 4)]
        objects: usize,
        /// Skip the single-unit search for cells the primary sweep cannot refute.
        #[arg(long)]
        no_secondary: bool,
    },
    /// List every preference profile of a domain.
    Enumerate {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        objects: usize,
        /// Print only the count.
        #[arg(long)]
        count: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckProperty {
    SdEfficient,
    ExPost,
    Unanimity,
    Perfect,
    SdEf,
    WeakSdEf,
    Anonymity,
    Neutrality,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Sd,
    WeakSd,
    Dl,
    Group,
}

fn guards(global: &Global) -> Result<Guards, HarnessError> {
    let env = match std::env::var("MUDRA_GUARD") {
        Ok(v) => Some(
            v.trim()
                .parse::<u64>()
                .map_err(|_| HarnessError::Usage(format!("MUDRA_GUARD must be a positive integer, got {v:?}")))?,
        ),
        Err(_) => None,
    };
    Ok(match global.guard.or(env) {
        Some(limit) => Guards::with_case_limit(limit),
        None => Guards::default(),
    })
}

fn emit<T: serde::Serialize>(json: bool, value: &T, human: impl FnOnce() -> String) {
    if json {
        print!("{}", to_canonical_json(value));
    } else {
        println!("{}", human());
    }
}

fn agent_index(profile: &PreferenceProfile, id: &str) -> Result<usize, HarnessError> {
    profile
        .instance()
        .agent_index(id)
        .ok_or_else(|| HarnessError::Usage(format!("unknown agent {id:?}")))
}

fn render_matrix(a: &RandomAssignment) -> String {
    let inst = a.instance();
    let mut out = format!("{:>8}", "");
    for o in inst.objects() {
        out.push_str(&format!("{o:>8}"));
    }
    for (agent, row) in inst.agents().iter().zip(a.rows()) {
        out.push_str(&format!("\n{agent:>8}"));
        for x in row {
            out.push_str(&format!("{:>8}", x.to_string()));
        }
    }
    out
}

fn render_report(r: &VerificationReport) -> String {
    let mut out = format!("{}: {:?}", r.command, r.verdict);
    for c in &r.checks {
        out.push_str(&format!("\n  [{}] {}", if c.pass { "ok" } else { "FAIL" }, c.name));
        if !c.pass {
            out.push_str(&format!("\n      expected {}\n      observed {}", c.expected, c.observed));
        }
        if let Some(note) = &c.note {
            out.push_str(&format!("\n      note: {note}"));
        }
    }
    for n in &r.notes {
        out.push_str(&format!("\n  note: {n}"));
    }
    if !r.certificates.is_empty() && r.checks.is_empty() {
        for c in &r.certificates {
            out.push_str(&format!("\n  certificate: {c}"));
        }
    }
    out
}

fn render_table(t: &Table1Report) -> String {
    let rules: Vec<&str> = ["uniform", "priority", "rp", "ops", "mps"].to_vec();
    let mut out = format!("{:<14}", "");
    for r in &rules {
        out.push_str(&format!("{r:>10}"));
    }
    for p in Property::ALL {
        out.push_str(&format!("\n{:<14}", p.key()));
        for r in &rules {
            let cell = t.cell(r, p);
            let text = match cell {
                Some(c) => {
                    let sign = match c.observed {
                        Observed::SupportedBySweep => "+",
                        Observed::CounterexampleFound => "-",
                        Observed::NoCounterexample => "?",
                        Observed::Refused => "refused",
                    };
                    if c.discrepancy {
                        format!("{sign}!")
                    } else {
                        sign.to_string()
                    }
                }
                None => "".into(),
            };
            out.push_str(&format!("{text:>10}"));
        }
    }
    out.push_str(&format!(
        "\n\nprimary domain: {} agents, {} objects, {} profiles",
        t.primary.agents, t.primary.objects, t.primary.profiles
    ));
    if let Some(s) = &t.secondary {
        out.push_str(&format!(
            "\nsecondary domain: {} agents, {} objects, {} profiles",
            s.agents, s.objects, s.profiles
        ));
    }
    out.push_str(&format!(
        "\nhierarchy: {} checks, {} violations",
        t.hierarchy.checks,
        t.hierarchy.violations.len()
    ));
    out.push_str(&format!(
        "\nex-post + weak SD-SP + SD-EF unrefuted: {}",
        if t.jointly_unrefuted.is_empty() {
            "none".to_string()
        } else {
            t.jointly_unrefuted.join(", ")
        }
    ));
    for timing in &t.timing {
        out.push_str(&format!("\ntime in {}: {} us", timing.rule, timing.micros));
    }
    out.push_str(&format!("\ndiscrepancies: {}", t.discrepancies()));
    out
}

fn run(cli: Cli) -> Result<i32, HarnessError> {
    let guards = guards(&cli.global)?;
    let json = cli.global.json;
    let started = Instant::now();
    match cli.command {
        Command::Compute { rule, profile, trace } => {
            let profile = load_profile(&profile)?;
            if trace {
                match rule.trace(&profile) {
                    Some(t) => {
                        let t = t?;
                        emit(json, &t, || {
                            let mut s = render_matrix(&t.assignment);
                            let bps: Vec<String> = t.breakpoints().iter().map(ToString::to_string).collect();
                            s.push_str(&format!("\nbreakpoints: {}", bps.join(", ")));
                            s
                        });
                        return Ok(0);
                    }
                    None => return Err(HarnessError::Usage(format!("{rule} has no eating trace"))),
                }
            }
            let a = rule.assign(&profile)?;
            emit(json, &a, || render_matrix(&a));
            Ok(0)
        }
        Command::Check {
            property,
            profile,
            assignment,
            rule,
            allow_unbalanced,
            permutation,
        } => {
            let profile = load_profile(&profile)?;
            let mut report = VerificationReport::new(format!("check {}", property_name(property)), &guards);
            report.property = Some(property_name(property).to_string());
            let holds = match property {
                CheckProperty::Anonymity | CheckProperty::Neutrality => {
                    let rule = rule.ok_or_else(|| HarnessError::Usage("--rule is required for axiom checks".into()))?;
                    let len = if matches!(property, CheckProperty::Anonymity) {
                        profile.n()
                    } else {
                        profile.m()
                    };
                    let perms = match permutation {
                        Some(images) => {
                            let zero_based = images
                                .iter()
                                .map(|&x| x.checked_sub(1).ok_or_else(|| HarnessError::Usage("permutations are 1-based".into())))
                                .collect::<Result<Vec<_>, _>>()?;
                            vec![Permutation::new(zero_based)?]
                        }
                        None => Permutation::all(len),
                    };
                    let mut holds = true;
                    for pi in perms {
                        let v = if matches!(property, CheckProperty::Anonymity) {
                            check_anonymity(&rule, &profile, &pi)?
                        } else {
                            check_neutrality(&rule, &profile, &pi)?
                        };
                        if !v.holds {
                            holds = false;
                            report.certificate(&v);
                            break;
                        }
                    }
                    holds
                }
                _ => {
                    let a = match (&assignment, &rule) {
                        (Some(path), _) => load_assignment(path, profile.instance())?,
                        (None, Some(rule)) => rule.assign(&profile)?,
                        (None, None) => {
                            return Err(HarnessError::Usage("give --assignment or --rule".into()));
                        }
                    };
                    match property {
                        CheckProperty::SdEfficient => certify(&mut report, is_sd_efficient(&a, &profile)?),
                        CheckProperty::ExPost => {
                            certify(&mut report, is_ex_post_efficient(&a, &profile, allow_unbalanced, &guards)?)
                        }
                        CheckProperty::Unanimity => certify(&mut report, unanimity_of(&a, &profile)?),
                        CheckProperty::Perfect => certify(&mut report, is_perfect(&a, &profile)?),
                        CheckProperty::SdEf => {
                            let v = is_sd_envy_free(&a, &profile)?;
                            report.certificate(&v);
                            v.holds
                        }
                        CheckProperty::WeakSdEf => {
                            let v = is_weak_sd_envy_free(&a, &profile)?;
                            report.certificate(&v);
                            v.holds
                        }
                        CheckProperty::Anonymity | CheckProperty::Neutrality => unreachable!(),
                    }
                }
            };
            report.verdict = if holds { Verdict::Holds } else { Verdict::Fails };
            report.elapsed_ms = started.elapsed().as_millis() as u64;
            emit(json, &report, || render_report(&report));
            Ok(0)
        }
        Command::Manipulate {
            rule,
            profile,
            agent,
            coalition,
            kind,
        } => {
            let profile = load_profile(&profile)?;
            let found = match (kind, agent, coalition) {
                (KindArg::Group, None, None) => find_any_group_manipulation(&rule, &profile, &guards)?,
                (KindArg::Group, Some(a), None) => {
                    find_group_manipulation(&rule, &profile, &[agent_index(&profile, &a)?], &guards)?
                }
                (KindArg::Group, None, Some(ids)) => {
                    let members = ids
                        .iter()
                        .map(|id| agent_index(&profile, id))
                        .collect::<Result<Vec<_>, _>>()?;
                    find_group_manipulation(&rule, &profile, &members, &guards)?
                }
                (k, Some(a), None) => {
                    let kind = match k {
                        KindArg::Sd => ManipulationKind::SdStrategyproofness,
                        KindArg::WeakSd => ManipulationKind::WeakSdStrategyproofness,
                        KindArg::Dl => ManipulationKind::DlStrategyproofness,
                        KindArg::Group => unreachable!(),
                    };
                    find_manipulation(&rule, &profile, agent_index(&profile, &a)?, kind, &guards)?
                }
                (_, None, _) => return Err(HarnessError::Usage("--agent is required for individual kinds".into())),
                (_, Some(_), Some(_)) => unreachable!("clap rejects --agent with --coalition"),
            };
            match &found {
                Some(m) => emit(json, m, || {
                    let names: Vec<String> = m
                        .coalition
                        .iter()
                        .map(|&i| {
                            format!(
                                "agent {} reports {}",
                                profile.instance().agents()[i],
                                m.reported.order_names(i).join(",")
                            )
                        })
                        .collect();
                    format!(
                        "{}\ntruthful:\n{}\nmanipulated:\n{}",
                        names.join("; "),
                        render_matrix(&m.truthful_outcome),
                        render_matrix(&m.manipulated_outcome)
                    )
                }),
                None => emit(json, &"none", || "none".to_string()),
            }
            Ok(0)
        }
        Command::Reproduce { case } => {
            let Some(case) = case else {
                emit(json, &CASES, || CASES.join("\n"));
                return Ok(0);
            };
            let mut report = reproduce(&case, &guards)?;
            report.elapsed_ms = started.elapsed().as_millis() as u64;
            emit(json, &report, || render_report(&report));
            Ok(exit_for(&report))
        }
        Command::Table1 {
            agents,
            objects,
            no_secondary,
        } => {
            let config = SweepConfig {
                primary: (agents, objects),
                secondary: if no_secondary { None } else { Some((4, 4)) },
                guards: guards.clone(),
                ..SweepConfig::default()
            };
            let table = table1_sweep(&config)?;
            emit(json, &table, || render_table(&table));
            Ok(if table.discrepancies() > 0 {
                1
            } else if table.refusals() > 0 {
                2
            } else {
                0
            })
        }
        Command::Enumerate { agents, objects, count } => {
            let space = enumerate_profiles(agents, objects, guards.profiles)?;
            if count {
                emit(json, &space.spec(), || space.len().to_string());
            } else if json {
                let all: Vec<PreferenceProfile> = space.iter().collect();
                emit(true, &all, String::new);
            } else {
                for p in space.iter() {
                    println!("{}", serde_json::to_string(&p).expect("profiles serialize"));
                }
            }
            Ok(0)
        }
    }
}

fn certify(report: &mut VerificationReport, v: mudra::efficiency::EfficiencyVerdict) -> bool {
    let holds = v.holds;
    report.certificate(&v);
    holds
}

fn exit_for(report: &VerificationReport) -> i32 {
    match report.verdict {
        Verdict::Discrepancy => 1,
        _ => 0,
    }
}

fn property_name(p: CheckProperty) -> &'static str {
    match p {
        CheckProperty::SdEfficient => "sd-efficient",
        CheckProperty::ExPost => "ex-post",
        CheckProperty::Unanimity => "unanimity",
        CheckProperty::Perfect => "perfect",
        CheckProperty::SdEf => "sd-ef",
        CheckProperty::WeakSdEf => "weak-sd-ef",
        CheckProperty::Anonymity => "anonymity",
        CheckProperty::Neutrality => "neutrality",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(k) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
