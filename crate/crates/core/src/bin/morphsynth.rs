fn main() {
    let code = morphsynth::cli::main_with_stdio(std::env::args_os());
    std::process::exit(code);
}
