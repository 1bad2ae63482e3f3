// Placeholder; the acceptance criteria are implemented once the library
// builds green.
int main() { return 1; }
