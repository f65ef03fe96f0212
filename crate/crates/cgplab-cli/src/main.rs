fn main() {
    let code = cgplab_cli::run(std::env::args_os());
    std::process::exit(code);
}
