fn main() {
    let (out, code) = z22_cli::run(std::env::args_os());
    print!("{out}");
    std::process::exit(code);
}
