# CLI 커맨드 패키지
