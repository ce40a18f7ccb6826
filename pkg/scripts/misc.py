from colorama import init, Fore, Style


def info():
    init()
    print(f"\nThanks for your interest in {Fore.YELLOW}regimecalc{Style.RESET_ALL}!\n")
    print(
        f"{Fore.BLUE}poetry install --with lint,test,devel{Style.RESET_ALL}:"
        + " Install development-ready version of the library"
    )
    print(f"{Fore.BLUE}poetry env remove --all{Style.RESET_ALL}: Remove all virtual environments\n")
    print(f"{Fore.BLUE}poetry run poe info{Style.RESET_ALL}: Display this message again")
    print(f"{Fore.BLUE}poetry run poe lint{Style.RESET_ALL}: Run linters")
    print(f"{Fore.BLUE}poetry run poe format{Style.RESET_ALL}: Run formatters")
    print(f"{Fore.BLUE}poetry run poe quick_test{Style.RESET_ALL}: Run tests, skipping the slow simulation sweeps")
    print(f"{Fore.BLUE}poetry run poe test_no_cov{Style.RESET_ALL}: Run all tests without coverage")
    print(f"{Fore.BLUE}poetry run poe test_all{Style.RESET_ALL}: Run ALL tests with coverage (slow, closest to CI)")
    print(f"{Fore.BLUE}poetry run poe clean{Style.RESET_ALL}: Clean all build artifacts\n")
