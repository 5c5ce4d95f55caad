//! Same table as `morphsynth report --fixture gsm`.

fn main() {
    let args = ["morphsynth", "report", "--fixture", "gsm"];
    let code = morphsynth::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
