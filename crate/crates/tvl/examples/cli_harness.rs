// Drives the command-line front end in-process, as the `tvl` binary would.

pub fn run_example() -> tvl::Result<Vec<(Vec<&'static str>, i32, String)>> {
    let calls: Vec<Vec<&'static str>> = vec![
        vec!["gen", "--family", "abelian:2x2"],
        vec!["solve", "--exact", "--n", "6"],
        vec![
            "solve",
            "--nibble",
            "--family",
            "random:1:0",
            "--n",
            "20",
            "--format",
            "csv",
        ],
        vec![
            "switchers",
            "--bounds",
            "--family",
            "random:2:0",
            "--n",
            "6",
        ],
        vec!["sts", "--brouwer", "--m", "5", "--seeds", "10"],
        vec!["template", "--h", "5"],
    ];
    Ok(calls
        .into_iter()
        .map(|args| {
            let mut out = Vec::new();
            let mut err = Vec::new();
            let code = tvl::cli::run_with(
                std::iter::once("tvl").chain(args.iter().copied()),
                &mut out,
                &mut err,
            );
            let text = if code == 0 { out } else { err };
            (args, code, String::from_utf8_lossy(&text).into_owned())
        })
        .collect())
}

#[allow(dead_code)]
fn main() -> tvl::Result<()> {
    for (args, code, text) in run_example()? {
        let first = text.lines().next().unwrap_or("");
        let short: String = first.chars().take(100).collect();
        println!("tvl {} -> exit {code}: {short}", args.join(" "));
    }
    Ok(())
}
