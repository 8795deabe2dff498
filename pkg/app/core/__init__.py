# 핵심 설정 / 예외 패키지
