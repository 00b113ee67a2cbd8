use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use comp_bss::campaign::{
    run_campaign, Campaign, CampaignConfig, Manifest, OutputFormat, FULL_DROPS, FULL_FADING,
};
use comp_bss::{figures, Error};

/// Monte-Carlo campaigns for base-station switching with CoMP.
#[derive(Debug, Parser)]
#[command(name = "comp-bss", version)]
struct Cli {
    /// TOML campaign file; built-in defaults are used without it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Emit the columns behind one figure (fig4 .. fig11). Without a
    /// config file the figure's sweep preset is used.
    #[arg(long)]
    figure: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drops: Option<usize>,
    #[arg(long)]
    fading: Option<usize>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Pattern list file.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// CoMP configuration: C1, C2, C3, none or a cluster file. Repeatable.
    #[arg(long)]
    comp: Vec<String>,
    /// 500 drops x 50 fading realizations instead of the desk-scale default.
    #[arg(long)]
    full_scale: bool,
}

enum Failure {
    Config(Error),
    Runtime(Error),
}

fn build(cli: &Cli) -> Result<CampaignConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => CampaignConfig::load(p)?,
        None => CampaignConfig::default(),
    };
    if let Some(f) = &cli.figure {
        cfg.figure = Some(f.clone());
    }
    if cli.config.is_none() {
        if let Some(f) = cfg.figure.clone() {
            cfg = figures::preset(&f, cfg)?;
        }
    }
    if cli.full_scale {
        cfg.n_drops = FULL_DROPS;
        cfg.n_fading = FULL_FADING;
    }
    if let Some(s) = cli.seed {
        cfg.master_seed = s;
    }
    if let Some(d) = cli.drops {
        cfg.n_drops = d;
    }
    if let Some(f) = cli.fading {
        cfg.n_fading = f;
    }
    if let Some(o) = &cli.out {
        cfg.output = Some(o.clone());
    }
    if let Some(f) = cli.format {
        cfg.format = f;
    }
    if let Some(p) = &cli.patterns {
        cfg.patterns = Some(p.clone());
    }
    if !cli.comp.is_empty() {
        cfg.comp = cli.comp.clone();
    }
    if let Some(f) = &cfg.figure {
        if !figures::FIGURES.contains(&f.as_str()) {
            return Err(Error::Config(format!(
                "unknown figure `{f}`, expected one of {}",
                figures::FIGURES.join(", ")
            )));
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = build(&cli).map_err(Failure::Config)?;
    let campaign = Campaign::new(cfg).map_err(Failure::Config)?;
    let cfg = &campaign.config;

    // Fail on an unwritable destination before spending time on the sweep.
    let mut sink: Box<dyn Write> = match &cfg.output {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Runtime(Error::Io { path: p.clone(), source: e }))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };

    let results = run_campaign(&campaign).map_err(Failure::Runtime)?;
    let written = match (&cfg.figure, cfg.format) {
        (Some(tag), OutputFormat::Csv) => figures::emit_figure_data(&results, tag, &mut sink),
        (Some(tag), OutputFormat::Json) => figures::emit_figure_json(&results, tag, &mut sink),
        (None, OutputFormat::Csv) => results.write_csv(&mut sink),
        (None, OutputFormat::Json) => results.write_json(&mut sink),
    };
    written.map_err(|e| match e {
        e @ Error::MissingAxis { .. } => Failure::Config(e),
        e => Failure::Runtime(e),
    })?;
    sink.flush()
        .map_err(|e| Failure::Runtime(Error::Io { path: "<output>".into(), source: e }))?;

    if let Some(p) = &cfg.output {
        let mut name = p.as_os_str().to_owned();
        name.push(".manifest.json");
        let manifest_path = PathBuf::from(name);
        Manifest::new(&campaign, &results, Some(p))
            .write(&manifest_path)
            .map_err(Failure::Runtime)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
