fn main() {
    let code = kirchhoff::cli::main_with_args(std::env::args_os());
    std::process::exit(i32::from(code));
}
