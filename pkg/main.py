# main.py
"""
Ponto de entrada principal do Kit de Assinaturas.
Prepara as pastas e repassa os argumentos para a CLI.
"""

import sys
import os

# Adiciona o diretório raiz ao path para imports funcionarem
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from core.logger import log_info, log_error
from core.paths import ensure_directories
from ui.cli import main as cli_main


def main() -> int:
    """
    Função principal do aplicativo.

    Returns:
        int: Código de saída (0 aceito, 1 rejeitado, 2 erro de uso)
    """
    try:
        ensure_directories()
        code = cli_main(sys.argv[1:])
        log_info(f"[MAIN] Encerrado com código {code}")
        return code

    except Exception as e:
        log_error(f"[MAIN] Erro crítico: {e}")
        import traceback
        log_error(f"[MAIN] Traceback completo:\n{traceback.format_exc()}")
        print(f"erro interno: {e} (detalhes em logs/app.log)", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
