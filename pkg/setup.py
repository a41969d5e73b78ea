#!/usr/bin/env python3
"""
setup.py - Script de configuração inicial do gaugenet
Funciona em Windows, Mac e Linux
"""

import platform
import secrets
import shutil
import string
import subprocess
import sys
from pathlib import Path

BACKEND = Path('backend')


class Colors:
    """Cores para output no terminal"""
    GREEN = '\033[92m'
    YELLOW = '\033[93m'
    RED = '\033[91m'
    CYAN = '\033[96m'
    RESET = '\033[0m'
    BOLD = '\033[1m'


def print_header():
    print(f"{Colors.CYAN}{Colors.BOLD}")
    print("=" * 50)
    print("    🌊 gaugenet - Setup Inicial")
    print(f"    Sistema: {platform.system()} {platform.release()}")
    print("=" * 50)
    print(f"{Colors.RESET}\n")


def venv_python() -> Path:
    if platform.system() == 'Windows':
        return BACKEND / 'venv' / 'Scripts' / 'python.exe'
    return BACKEND / 'venv' / 'bin' / 'python'


def run_command(command, cwd=None):
    """Executa comando e devolve (sucesso, saída)"""
    result = subprocess.run(command, cwd=cwd, capture_output=True, text=True)
    if result.returncode != 0:
        print(f"{Colors.RED}{result.stderr.strip()}{Colors.RESET}")
    return result.returncode == 0, result.stdout


def create_env_file():
    """Cria backend/.env a partir do .env.example com SECRET_KEY gerada"""
    print(f"\n{Colors.YELLOW}🔧 Configurando arquivo .env...{Colors.RESET}")
    env_path = BACKEND / '.env'
    example_path = BACKEND / '.env.example'

    if env_path.exists():
        print(f"{Colors.YELLOW}⚠ Arquivo .env já existe{Colors.RESET}")
        return True
    if not example_path.exists():
        print(f"{Colors.RED}❌ Arquivo .env.example não encontrado!{Colors.RESET}")
        return False

    shutil.copy(example_path, env_path)
    secret_key = ''.join(secrets.choice(string.ascii_letters + string.digits) for _ in range(50))
    content = env_path.read_text(encoding='utf-8')
    env_path.write_text(content.replace('your-secret-key-here-change-in-production', secret_key), encoding='utf-8')
    print(f"{Colors.GREEN}✓ Arquivo .env criado com sucesso{Colors.RESET}")
    return True


def setup_python_env():
    print(f"\n{Colors.YELLOW}🐍 Configurando ambiente Python...{Colors.RESET}")
    if not (BACKEND / 'venv').exists():
        ok, _ = run_command([sys.executable, '-m', 'venv', 'venv'], cwd=BACKEND)
        if not ok:
            print(f"{Colors.RED}❌ Erro ao criar virtual environment{Colors.RESET}")
            return False
    python = str(venv_python().resolve())
    ok, _ = run_command([python, '-m', 'pip', 'install', '-r', 'requirements.txt'], cwd=BACKEND)
    if ok:
        print(f"{Colors.GREEN}✓ Dependências instaladas{Colors.RESET}")
    return ok


def check_project():
    print(f"\n{Colors.YELLOW}🔎 Verificando projeto...{Colors.RESET}")
    ok, _ = run_command([str(venv_python().resolve()), 'manage.py', 'check'], cwd=BACKEND)
    if ok:
        print(f"{Colors.GREEN}✓ manage.py check sem problemas{Colors.RESET}")
    return ok


def print_success():
    print(f"\n{Colors.GREEN}{'=' * 50}")
    print("✅ Setup concluído com sucesso!")
    print(f"{'=' * 50}{Colors.RESET}\n")
    print(f"{Colors.CYAN}Exemplo rápido:{Colors.RESET}")
    print("   cd backend")
    print("   python manage.py synthesize_panel --p 6 --n 1200 --seed 1 --output-dir demo")
    print("   python manage.py select_graph --panel demo/panel.csv --k-min 1 --res 5 --output-dir demo")
    print("   pytest   # na raiz do projeto\n")


def main():
    print_header()
    if not BACKEND.exists():
        print(f"{Colors.RED}❌ Execute este script na raiz do projeto{Colors.RESET}")
        sys.exit(1)

    steps = [
        ("Criando arquivo .env", create_env_file),
        ("Configurando Python", setup_python_env),
        ("Verificando projeto", check_project),
    ]
    for step_name, step_func in steps:
        if not step_func():
            print(f"\n{Colors.RED}❌ Setup falhou em: {step_name}{Colors.RESET}")
            print(f"{Colors.YELLOW}Corrija o erro e execute novamente{Colors.RESET}")
            sys.exit(1)
    print_success()


if __name__ == "__main__" and len(sys.argv) > 1:
    # Invoked by a build frontend (pip/setuptools): metadata lives in pyproject.toml
    from setuptools import setup
    setup()
elif __name__ == "__main__":
    try:
        main()
    except KeyboardInterrupt:
        print(f"\n{Colors.YELLOW}Setup cancelado pelo usuário{Colors.RESET}")
        sys.exit(0)
